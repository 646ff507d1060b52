#include "perfsum/outcome.hpp"

#include <cctype>

#include "perfsum/errors.hpp"

namespace perfsum {

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
    case Outcome::tn: return "tn";
    case Outcome::fp: return "fp";
    case Outcome::fn: return "fn";
    case Outcome::tp: return "tp";
    }
    return "?";
}

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Outcome outcome_from_token(std::string_view token, std::string_view full) {
    std::string lowered;
    lowered.reserve(token.size());
    for (char c : token) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lowered == "tn") return Outcome::tn;
    if (lowered == "fp") return Outcome::fp;
    if (lowered == "fn") return Outcome::fn;
    if (lowered == "tp") return Outcome::tp;
    throw InvalidSpecError("unknown outcome '" + std::string(token) + "' in set '" +
                           std::string(full) + "'");
}

} // namespace

OutcomeSet OutcomeSet::from_bits(unsigned bits) {
    if (bits > 0b1111u) throw std::invalid_argument("outcome set bits out of range");
    return OutcomeSet(bits);
}

std::string OutcomeSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (Outcome o : kAllOutcomes) {
        if (!contains(o)) continue;
        if (!first) out += ',';
        out += perfsum::to_string(o);
        first = false;
    }
    out += '}';
    return out;
}

OutcomeSet OutcomeSet::parse(std::string_view text) {
    std::string_view body = strip(text);
    if (body.size() < 2 || body.front() != '{' || body.back() != '}')
        throw InvalidSpecError("outcome set must be brace-enclosed: '" + std::string(text) + "'");
    body = body.substr(1, body.size() - 2);
    OutcomeSet set;
    std::string_view rest = strip(body);
    if (rest.empty()) return set; // "{}" is the empty set
    while (true) {
        auto comma = rest.find(',');
        std::string_view token = strip(rest.substr(0, comma));
        if (token.empty())
            throw InvalidSpecError("empty outcome in set '" + std::string(text) + "'");
        Outcome o = outcome_from_token(token, text);
        if (set.contains(o))
            throw InvalidSpecError("duplicate outcome '" + std::string(token) + "' in set '" +
                                   std::string(text) + "'");
        set.bits_ |= static_cast<std::uint8_t>(mask(o));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return set;
}

} // namespace perfsum
