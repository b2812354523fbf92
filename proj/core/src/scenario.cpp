#include "ehpf/scenario.hpp"

#include <charconv>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ehpf/error.hpp"

namespace ehpf {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

double parse_number(std::string_view word, int line) {
  double value = 0.0;
  const char* end = word.data() + word.size();
  const auto [ptr, ec] = std::from_chars(word.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "not a number: '" + std::string(word) + "'");
  }
  return value;
}

std::vector<double> parse_numbers(const std::vector<std::string_view>& words,
                                  int line) {
  if (words.size() < 2) {
    throw ParseError(line, std::string(words[0]) + " needs at least one value");
  }
  std::vector<double> out;
  for (std::size_t i = 1; i < words.size(); ++i) {
    out.push_back(parse_number(words[i], line));
  }
  return out;
}

std::string_view single_word(const std::vector<std::string_view>& words,
                             int line) {
  if (words.size() != 2) {
    throw ParseError(line, std::string(words[0]) + " takes exactly one value");
  }
  return words[1];
}

void write_list(std::ostream& os, const char* key,
                const std::vector<double>& values) {
  os << key;
  for (double v : values) os << ' ' << v;
  os << '\n';
}

}  // namespace

const char* to_string(HarvestProfile profile) {
  switch (profile) {
    case HarvestProfile::kRegular:
      return "regular";
    case HarvestProfile::kBursty:
      return "bursty";
    case HarvestProfile::kVeryBursty:
      return "very-bursty";
  }
  return "?";
}

const char* to_string(PathLossCase c) {
  switch (c) {
    case PathLossCase::kLow:
      return "low";
    case PathLossCase::kModerate:
      return "moderate";
    case PathLossCase::kHigh:
      return "high";
  }
  return "?";
}

std::optional<HarvestProfile> parse_harvest_profile(std::string_view name) {
  for (auto p : {HarvestProfile::kRegular, HarvestProfile::kBursty,
                 HarvestProfile::kVeryBursty}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

std::optional<PathLossCase> parse_pathloss_case(std::string_view name) {
  for (auto c : {PathLossCase::kLow, PathLossCase::kModerate,
                 PathLossCase::kHigh}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

const std::vector<double>& harvests(HarvestProfile profile) {
  static const std::vector<double> regular = {73, 65, 9,  19, 40, 37,
                                              22, 84, 39, 67, 81, 100};
  static const std::vector<double> bursty = {20, 100, 1, 1, 1,
                                             70, 100, 1, 10, 40};
  static const std::vector<double> very_bursty = {90,  2,   0.5, 0.1,
                                                  0.3, 0.7, 40,  60};
  switch (profile) {
    case HarvestProfile::kRegular:
      return regular;
    case HarvestProfile::kBursty:
      return bursty;
    case HarvestProfile::kVeryBursty:
      return very_bursty;
  }
  return regular;
}

double ladder_start_db(PathLossCase c) {
  switch (c) {
    case PathLossCase::kLow:
      return 13.0;
    case PathLossCase::kModerate:
      return 19.0;
    case PathLossCase::kHigh:
      return 25.0;
  }
  return 19.0;
}

std::vector<double> path_loss_ladder(PathLossCase c, int users) {
  if (users < 1) throw InvalidArgument("path loss ladder needs at least one user");
  std::vector<double> out;
  for (int i = 0; i < users; ++i) out.push_back(ladder_start_db(c) + 3.0 * i);
  return out;
}

std::string Scenario::case_label() const {
  return pathloss_case ? to_string(*pathloss_case) : "custom";
}

Scenario make_scenario(HarvestProfile profile, PathLossCase c, int users) {
  Scenario s;
  s.params.harvests = harvests(profile);
  s.params.path_loss_db = path_loss_ladder(c, users);
  s.label = to_string(profile);
  s.profile = profile;
  s.pathloss_case = c;
  s.users = users;
  return s;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  // Line of the CASE/USERS key that must be resolved into a ladder.
  int ladder_line = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto words = split_words(line);
    if (words.empty()) continue;

    const std::string_view key = words[0];
    if (key == "W") {
      s.params.bandwidth_hz = parse_number(single_word(words, line_no), line_no);
    } else if (key == "N0") {
      s.params.noise_density = parse_number(single_word(words, line_no), line_no);
    } else if (key == "T") {
      s.params.slot_length = parse_number(single_word(words, line_no), line_no);
    } else if (key == "EPSILON") {
      s.params.epsilon_share = parse_number(single_word(words, line_no), line_no);
    } else if (key == "HARVESTS") {
      s.params.harvests = parse_numbers(words, line_no);
      s.profile.reset();
      s.label = "custom";
    } else if (key == "PATHLOSS_DB") {
      s.params.path_loss_db = parse_numbers(words, line_no);
      s.pathloss_case.reset();
      s.users.reset();
      ladder_line = 0;
    } else if (key == "SCENARIO") {
      const auto name = single_word(words, line_no);
      const auto profile = parse_harvest_profile(name);
      if (!profile) {
        throw ParseError(line_no, "unknown scenario '" + std::string(name) + "'");
      }
      s.profile = profile;
      s.params.harvests = harvests(*profile);
      s.label = to_string(*profile);
    } else if (key == "CASE") {
      const auto name = single_word(words, line_no);
      const auto c = parse_pathloss_case(name);
      if (!c) throw ParseError(line_no, "unknown case '" + std::string(name) + "'");
      s.pathloss_case = c;
      ladder_line = line_no;
    } else if (key == "USERS") {
      const double n = parse_number(single_word(words, line_no), line_no);
      if (n < 1 || n != static_cast<int>(n)) {
        throw ParseError(line_no, "USERS must be a positive integer");
      }
      s.users = static_cast<int>(n);
      ladder_line = line_no;
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }

  if (ladder_line > 0) {
    if (!s.pathloss_case || !s.users) {
      throw ParseError(ladder_line, "CASE and USERS must be given together");
    }
    s.params.path_loss_db = path_loss_ladder(*s.pathloss_case, *s.users);
  }
  if (s.params.harvests.empty()) {
    throw ParseError(0, "missing HARVESTS or SCENARIO");
  }
  if (s.params.path_loss_db.empty()) {
    throw ParseError(0, "missing PATHLOSS_DB or CASE/USERS");
  }
  try {
    (void)s.instance();
  } catch (const InvalidArgument& e) {
    throw ParseError(0, e.what());
  }
  return s;
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (s.profile) {
    os << "SCENARIO " << to_string(*s.profile) << '\n';
  } else {
    write_list(os, "HARVESTS", s.params.harvests);
  }
  if (s.pathloss_case && s.users) {
    os << "CASE " << to_string(*s.pathloss_case) << '\n';
    os << "USERS " << *s.users << '\n';
  } else {
    write_list(os, "PATHLOSS_DB", s.params.path_loss_db);
  }
  os << "W " << s.params.bandwidth_hz << '\n';
  os << "N0 " << s.params.noise_density << '\n';
  os << "T " << s.params.slot_length << '\n';
  if (s.params.epsilon_share) os << "EPSILON " << *s.params.epsilon_share << '\n';
  return os.str();
}

}  // namespace ehpf
