// Copyright 2026 The Fuseplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSEPLAN_RATIONAL_H_
#define FUSEPLAN_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fuseplan {

// Exact non-negative fraction, always stored in lowest terms with den > 0.
// Overhead factors and their caps are compared with this type so that a
// setting sitting exactly on its cap (F == F_max) is never lost to rounding.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  static Rational Integer(std::int64_t value) { return Rational(value, 1); }

  // Parses "3", "1.25", "13/10". Throws ValueError on anything else.
  static Rational Parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // "num/den", or just "num" when den == 1.
  std::string ToString() const;
  // Decimal rendering rounded half-up to the given number of places.
  std::string ToDecimal(int places) const;
  double ToDouble() const { return static_cast<double>(num_) / den_; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace fuseplan

#endif  // FUSEPLAN_RATIONAL_H_
