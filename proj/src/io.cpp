#include "macap/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace macap {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

std::size_t get_size(const json& doc, const char* key, const std::string& origin) {
    if (!doc.contains(key)) throw ParseError(origin + ": missing key '" + key + "'");
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw ParseError(origin + ": key '" + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

Mac parse_mac_text(const std::string& text, const std::string& origin) {
    json doc = parse_json(text, origin);
    std::size_t d1 = get_size(doc, "d1", origin);
    std::size_t d2 = get_size(doc, "d2", origin);
    std::size_t dout = get_size(doc, "dout", origin);
    if (!doc.contains("transition") || !doc["transition"].is_array()) {
        throw ParseError(origin + ": missing 'transition' array");
    }
    const json& tr = doc["transition"];
    if (tr.size() != dout) {
        throw ParseError(origin + ": transition has " + std::to_string(tr.size()) +
                         " output slices, expected " + std::to_string(dout));
    }
    std::vector<double> flat(dout * d1 * d2);
    for (std::size_t z = 0; z < dout; ++z) {
        const json& slice = tr[z];
        if (!slice.is_array() || slice.size() != d1) {
            throw ParseError(origin + ": transition[" + std::to_string(z) + "] must have " +
                             std::to_string(d1) + " rows");
        }
        for (std::size_t b1 = 0; b1 < d1; ++b1) {
            const json& row = slice[b1];
            if (!row.is_array() || row.size() != d2) {
                throw ParseError(origin + ": transition[" + std::to_string(z) + "][" +
                                 std::to_string(b1) + "] must have " + std::to_string(d2) +
                                 " entries");
            }
            for (std::size_t b2 = 0; b2 < d2; ++b2) {
                if (!row[b2].is_number()) {
                    throw ParseError(origin + ": transition entry at [" + std::to_string(z) +
                                     "][" + std::to_string(b1) + "][" + std::to_string(b2) +
                                     "] is not a number");
                }
                flat[(z * d1 + b1) * d2 + b2] = row[b2].get<double>();
            }
        }
    }
    return Mac(d1, d2, dout, std::move(flat));
}

Mac parse_mac_file(const std::string& path) { return parse_mac_text(read_file(path), path); }

std::string mac_to_text(const Mac& mac) {
    json tr = json::array();
    for (std::size_t z = 0; z < mac.dout(); ++z) {
        json slice = json::array();
        for (std::size_t b1 = 0; b1 < mac.d1(); ++b1) {
            json row = json::array();
            for (std::size_t b2 = 0; b2 < mac.d2(); ++b2) row.push_back(mac.at(z, b1, b2));
            slice.push_back(std::move(row));
        }
        tr.push_back(std::move(slice));
    }
    json doc;
    doc["d1"] = mac.d1();
    doc["d2"] = mac.d2();
    doc["dout"] = mac.dout();
    doc["transition"] = std::move(tr);
    return doc.dump(1) + "\n";
}

void write_mac_file(const std::string& path, const Mac& mac) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << mac_to_text(mac);
    if (!out) throw ParseError(path + ": write failed");
}

namespace {

NonlocalGame dispatch_builtin(const std::string& spec) {
    std::string rest = spec.substr(8);  // past "builtin:"
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t colon = rest.find(':', start);
        parts.push_back(rest.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto arg = [&](std::size_t i) -> std::size_t {
        if (i >= parts.size()) throw ParseError(spec + ": missing argument");
        try {
            long long v = std::stoll(parts[i]);
            if (v < 0) throw ParseError(spec + ": negative argument");
            return static_cast<std::size_t>(v);
        } catch (const std::logic_error&) {
            throw ParseError(spec + ": argument '" + parts[i] + "' is not an integer");
        }
    };
    if (parts[0] == "chsh") return chsh();
    if (parts[0] == "magic_square") return magic_square();
    if (parts[0] == "multiparty_parity") return multiparty_parity(arg(1));
    if (parts[0] == "signalling") return signalling(arg(1), arg(2));
    throw ParseError(spec + ": unknown builtin game");
}

}  // namespace

NonlocalGame parse_game_text(const std::string& text, const std::string& origin) {
    json doc = parse_json(text, origin);
    std::size_t players = get_size(doc, "players", origin);
    auto sizes = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != players) {
            throw ParseError(origin + ": '" + std::string(key) + "' must list one size per player");
        }
        std::vector<std::size_t> out;
        for (const json& v : doc[key]) {
            if (!v.is_number_integer() || v.get<long long>() <= 0) {
                throw ParseError(origin + ": '" + std::string(key) +
                                 "' entries must be positive integers");
            }
            out.push_back(v.get<std::size_t>());
        }
        return out;
    };
    std::vector<std::size_t> question_sizes = sizes("question_sizes");
    std::vector<std::size_t> answer_sizes = sizes("answer_sizes");

    if (!doc.contains("winning") || !doc["winning"].is_array()) {
        throw ParseError(origin + ": missing 'winning' array");
    }
    // build via a probe game to reuse tuple indexing and range checks
    NonlocalGame probe(question_sizes, answer_sizes, {});
    std::vector<std::pair<std::size_t, std::size_t>> winning;
    std::size_t entry_index = 0;
    for (const json& entry : doc["winning"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() ||
            !entry[1].is_array()) {
            throw ParseError(origin + ": winning[" + std::to_string(entry_index) +
                             "] must be [question-tuple, answer-tuple]");
        }
        auto tuple = [&](const json& arr, std::size_t arity) {
            if (arr.size() != arity) {
                throw ParseError(origin + ": winning[" + std::to_string(entry_index) +
                                 "] tuple has arity " + std::to_string(arr.size()) +
                                 ", expected " + std::to_string(arity));
            }
            std::vector<std::size_t> out;
            for (const json& v : arr) {
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    throw ParseError(origin + ": winning[" + std::to_string(entry_index) +
                                     "] has a non-index entry");
                }
                out.push_back(v.get<std::size_t>());
            }
            return out;
        };
        std::vector<std::size_t> q = tuple(entry[0], players);
        std::vector<std::size_t> a = tuple(entry[1], players);
        try {
            winning.emplace_back(probe.question_index(q), probe.answer_index(a));
        } catch (const ValidationError& e) {
            throw ParseError(origin + ": winning[" + std::to_string(entry_index) +
                             "]: " + e.what());
        }
        ++entry_index;
    }
    return NonlocalGame(std::move(question_sizes), std::move(answer_sizes), std::move(winning));
}

NonlocalGame parse_game_file(const std::string& path_or_builtin) {
    if (path_or_builtin.rfind("builtin:", 0) == 0) {
        return dispatch_builtin(path_or_builtin);
    }
    return parse_game_text(read_file(path_or_builtin), path_or_builtin);
}

}  // namespace macap
