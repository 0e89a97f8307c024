#pragma once

#include <cmath>
#include <span>

namespace topiclens {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd; 0 for fewer than two values
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  bool constant = true;
  for (double v : values) constant = constant && v == values.front();
  if (constant) {
    s.mean = values.front();  // exact, so identical runs report sd = 0 bit-for-bit
    return s;
  }
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

}  // namespace topiclens
