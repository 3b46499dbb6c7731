#pragma once

// Unit constants and conversions. Everything downstream of scenario
// ingestion works in SI: W, Pa, kg/s, K (relative to ambient for DHN
// temperatures), seconds.

namespace oef::units {

inline constexpr double kGravity = 9.80665;  // m/s^2
inline constexpr double kBar = 1.0e5;        // Pa
inline constexpr double kMegawatt = 1.0e6;   // W

inline double bar_to_pascal(double bar) { return bar * kBar; }
inline double pascal_to_bar(double pa) { return pa / kBar; }
inline double mw_to_watt(double mw) { return mw * kMegawatt; }
inline double watt_to_mw(double w) { return w / kMegawatt; }

// DHN temperatures are relative to ambient inside the model; absolute
// Celsius appears only in scenario files and reports.
inline double celsius_to_relative(double deg_c, double ambient_c) {
  return deg_c - ambient_c;
}
inline double relative_to_celsius(double t_rel, double ambient_c) {
  return t_rel + ambient_c;
}

}  // namespace oef::units
