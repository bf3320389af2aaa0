#include "tdi/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tdi {

namespace {

std::int64_t parse_int(const std::string& token, const char* what) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty())
        throw Error(Errc::parse_error, std::string("invalid ") + what + " '" + token + "'");
    return v;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SetWindow parse_set_text(const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(lines, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string w;
        while (words >> w) tokens.push_back(w);
    }
    if (tokens.size() < 2 || tokens[0] != "N") throw Error(Errc::parse_error, "set file must start with 'N <value>'");
    const std::int64_t n = parse_int(tokens[1], "length");
    if (n < 1) throw Error(Errc::parse_error, "N must be positive");
    SetWindow window(n);
    if (tokens.size() >= 3 && tokens[2] == "mask") {
        if (tokens.size() != 4) throw Error(Errc::parse_error, "mask form expects exactly one hex string");
        std::string hex = tokens[3];
        if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            int d = hex_digit(hex[hex.size() - 1 - i]);
            if (d < 0) throw Error(Errc::parse_error, "invalid hex digit in mask");
            for (int b = 0; b < 4; ++b) {
                if (!(d >> b & 1)) continue;
                auto x = static_cast<std::int64_t>(4 * i + static_cast<std::size_t>(b)) + 1;
                if (x > n) throw Error(Errc::parse_error, "mask has bits beyond N");
                window.insert(x);
            }
        }
        return window;
    }
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        std::int64_t x = parse_int(tokens[i], "element");
        if (x < 1 || x > n) throw Error(Errc::parse_error, "element " + tokens[i] + " outside [1,N]");
        window.insert(x);
    }
    return window;
}

SetWindow read_set_file(const std::string& path) { return parse_set_text(read_text_file(path)); }

std::string mask_hex(const SetWindow& window) {
    const std::int64_t n = window.length();
    std::string out;
    for (std::int64_t base = 0; base < n; base += 4) {
        int d = 0;
        for (int b = 0; b < 4; ++b)
            if (window.contains(base + b + 1)) d |= 1 << b;
        out.push_back("0123456789abcdef"[d]);
    }
    while (out.size() > 1 && out.back() == '0') out.pop_back();
    return std::string(out.rbegin(), out.rend());
}

std::string format_set_mask(const SetWindow& window) {
    return "N " + std::to_string(window.length()) + "\nmask " + mask_hex(window) + "\n";
}

std::string format_set_list(const SetWindow& window) {
    std::string out = "N " + std::to_string(window.length()) + "\n";
    for (auto x : window.elements()) out += std::to_string(x) + "\n";
    return out;
}

DiagonalSystem parse_system_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("system file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("k") || !j.contains("lambda") || !j["k"].is_number_integer() ||
        !j["lambda"].is_array())
        throw Error(Errc::parse_error, "system file must be {\"k\": int, \"lambda\": [ints]}");
    std::vector<std::int64_t> lambda;
    for (const auto& v : j["lambda"]) {
        if (!v.is_number_integer()) throw Error(Errc::parse_error, "lambda entries must be integers");
        lambda.push_back(v.get<std::int64_t>());
    }
    return DiagonalSystem(j["k"].get<int>(), std::move(lambda));
}

DiagonalSystem read_system_file(const std::string& path) { return parse_system_json(read_text_file(path)); }

}  // namespace tdi
