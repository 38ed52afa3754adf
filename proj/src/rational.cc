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

#include "fuseplan/rational.h"

#include <charconv>
#include <numeric>
#include <string>

#include "fuseplan/errors.h"

namespace fuseplan {
namespace {

std::int64_t ParseDigits(std::string_view digits, std::string_view whole) {
  std::int64_t value = 0;
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, value);
  if (digits.empty() || ec != std::errc() || ptr != end || value < 0) {
    throw ValueError("malformed number '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValueError("rational with zero denominator");
  if (num < 0 || den < 0) throw ValueError("negative rational");
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::Parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(ParseDigits(text.substr(0, slash), text),
                    ParseDigits(text.substr(slash + 1), text));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Integer(ParseDigits(text, text));
  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.empty() || frac_part.size() > 12) {
    throw ValueError("malformed number '" + std::string(text) + "'");
  }
  std::int64_t scale = 1;
  for (size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  const std::int64_t whole = int_part.empty() ? 0 : ParseDigits(int_part, text);
  return Rational(whole * scale + ParseDigits(frac_part, text), scale);
}

std::string Rational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::ToDecimal(int places) const {
  __int128 scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const __int128 scaled = (static_cast<__int128>(num_) * scale * 2 + den_) /
                          (static_cast<__int128>(den_) * 2);
  const auto whole = static_cast<std::int64_t>(scaled / scale);
  std::string out = std::to_string(whole);
  if (places > 0) {
    std::string frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
    out += "." + std::string(places - frac.size(), '0') + frac;
  }
  return out;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace fuseplan
