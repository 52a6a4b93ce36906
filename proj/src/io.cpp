#include "poipg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "poipg/errors.hpp"

namespace poipg {

namespace {

using json = nlohmann::ordered_json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

[[noreturn]] void rewrap(const std::exception& e) { throw ParseError(e.what()); }

Role parse_role(const std::string& s) {
    if (s == "observed") return Role::Observed;
    if (s == "latent") return Role::Latent;
    if (s == "selection") return Role::Selection;
    throw ParseError("unknown role \"" + s + "\"");
}

EndpointMark parse_mark(const std::string& s) {
    if (s == "tail") return EndpointMark::Tail;
    if (s == "arrow") return EndpointMark::Arrow;
    if (s == "circle") return EndpointMark::Circle;
    throw ParseError("unknown endpoint mark \"" + s + "\"");
}

int lookup(const auto& g, const std::string& name, const char* where) {
    auto id = g.find_vertex(name);
    if (!id) throw ParseError(std::string(where) + " references unknown variable \"" + name + "\"");
    return *id;
}

std::string trim(std::string s) {
    auto space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && space(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && space(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<std::string> name_list(const std::string& field, int line) {
    std::vector<std::string> names = split(field, ',');
    for (const std::string& n : names)
        if (n.empty()) throw ParseError("empty variable name", line);
    return names;
}

}  // namespace

Dag parse_graph(const std::string& text) {
    json doc = parse_json(text);
    Dag g;
    try {
        if (!doc.is_object() || !doc.contains("variables") || !doc.contains("edges"))
            throw ParseError("graph document needs \"variables\" and \"edges\"");
        for (const json& v : doc.at("variables"))
            g.add_vertex(v.at("name").get<std::string>(),
                         parse_role(v.at("role").get<std::string>()));
        for (const json& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw ParseError("each edge must be a [parent, child] pair");
            g.add_edge(lookup(g, e.at(0).get<std::string>(), "edge"),
                       lookup(g, e.at(1).get<std::string>(), "edge"));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        rewrap(e);
    }
    return g;
}

std::string emit_graph(const Dag& g) {
    json doc;
    doc["variables"] = json::array();
    for (const Variable& v : g.vertices())
        doc["variables"].push_back({{"name", v.name}, {"role", role_name(v.role)}});
    doc["edges"] = json::array();
    for (auto [p, c] : g.edges())
        doc["edges"].push_back(json::array({g.vertex(p).name, g.vertex(c).name}));
    return doc.dump(2) + "\n";
}

Poipg parse_poipg(const std::string& text) {
    json doc = parse_json(text);
    try {
        if (!doc.is_object() || !doc.contains("variables") || !doc.contains("edges"))
            throw ParseError("graph document needs \"variables\" and \"edges\"");
        Poipg p(doc.at("variables").get<std::vector<std::string>>());
        for (const json& e : doc.at("edges"))
            p.add_edge(lookup(p, e.at("a").get<std::string>(), "edge"),
                       lookup(p, e.at("b").get<std::string>(), "edge"),
                       parse_mark(e.at("mark_a").get<std::string>()),
                       parse_mark(e.at("mark_b").get<std::string>()));
        for (const json& t : doc.value("noncolliders", json::array())) {
            if (!t.is_array() || t.size() != 3)
                throw ParseError("each non-collider must be an [x, y, z] triple");
            p.add_noncollider(lookup(p, t.at(0).get<std::string>(), "non-collider"),
                              lookup(p, t.at(1).get<std::string>(), "non-collider"),
                              lookup(p, t.at(2).get<std::string>(), "non-collider"));
        }
        return p;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        rewrap(e);
    }
}

std::string emit_poipg(const Poipg& p) {
    json doc;
    doc["variables"] = p.names();
    doc["edges"] = json::array();
    for (const PoipgEdge& e : p.edges())
        doc["edges"].push_back({{"a", p.names()[static_cast<std::size_t>(e.a)]},
                                {"b", p.names()[static_cast<std::size_t>(e.b)]},
                                {"mark_a", mark_name(e.at_a)},
                                {"mark_b", mark_name(e.at_b)}});
    doc["noncolliders"] = json::array();
    for (const NoncolliderTriple& t : p.noncolliders())
        doc["noncolliders"].push_back(json::array({p.names()[static_cast<std::size_t>(t.x)],
                                                   p.names()[static_cast<std::size_t>(t.y)],
                                                   p.names()[static_cast<std::size_t>(t.z)]}));
    return doc.dump(2) + "\n";
}

CiSet parse_ci(const std::string& text) {
    struct Line {
        int no;
        std::vector<std::string> x, z, y;
    };
    std::vector<Line> parsed;
    std::optional<std::vector<std::string>> declared;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.rfind("vars", 0) == 0 &&
            (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
            if (declared) throw ParseError("repeated vars line", line_no);
            if (!parsed.empty())
                throw ParseError("vars must come before the first statement", line_no);
            declared = name_list(trim(line.substr(4)), line_no);
            continue;
        }
        if (line.rfind("indep", 0) != 0)
            throw ParseError("expected an indep statement or a vars line", line_no);
        std::vector<std::string> fields = split(line.substr(5), ';');
        if (fields.size() != 3)
            throw ParseError("an indep statement needs three ';' separated fields", line_no);
        Line entry{line_no, name_list(fields[0], line_no), name_list(fields[1], line_no), {}};
        if (fields[2] != "-") entry.y = name_list(fields[2], line_no);
        parsed.push_back(std::move(entry));
    }

    std::vector<std::string> universe;
    if (declared) {
        universe = *declared;
    } else {
        std::set<std::string> seen;
        for (const Line& l : parsed)
            for (const auto* part : {&l.x, &l.z, &l.y}) seen.insert(part->begin(), part->end());
        universe.assign(seen.begin(), seen.end());
    }

    try {
        CiSet out(universe);
        for (const Line& l : parsed) {
            auto resolve = [&](const std::vector<std::string>& names) {
                VertexSet s;
                for (const std::string& n : names) {
                    auto it = std::find(universe.begin(), universe.end(), n);
                    if (it == universe.end())
                        throw ParseError("variable \"" + n + "\" is not in the vars line", l.no);
                    s.insert(static_cast<int>(it - universe.begin()));
                }
                return s;
            };
            try {
                out.insert(resolve(l.x), resolve(l.z), resolve(l.y));
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& e) {
                throw ParseError(e.what(), l.no);
            }
        }
        return out;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        rewrap(e);
    }
}

std::string emit_ci(const CiSet& s) {
    std::string out = "vars ";
    bool first = true;
    for (const std::string& n : s.universe()) {
        if (!first) out += ',';
        out += n;
        first = false;
    }
    out += '\n';
    auto render = [&](const VertexSet& v) {
        if (v.empty()) return std::string("-");
        std::string r;
        bool lead = true;
        for (int i : v) {
            if (!lead) r += ',';
            r += s.universe()[static_cast<std::size_t>(i)];
            lead = false;
        }
        return r;
    };
    for (const CiStatement& st : s.statements())
        out += "indep " + render(st.x) + " ; " + render(st.z) + " ; " + render(st.y) + "\n";
    return out;
}

Dataset parse_csv(const std::string& text) {
    std::map<std::string, int> arities;
    std::optional<std::vector<std::string>> header;
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<int> row_lines;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("#arity", 0) != 0) continue;
            std::string decl = trim(line.substr(6));
            auto eq = decl.find('=');
            if (eq == std::string::npos)
                throw ParseError("arity line must look like #arity name=k", line_no);
            std::string name = trim(decl.substr(0, eq));
            std::string value = trim(decl.substr(eq + 1));
            int k = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
            if (ec != std::errc() || p != value.data() + value.size() || name.empty())
                throw ParseError("arity line must look like #arity name=k", line_no);
            if (arities.count(name)) throw ParseError("repeated arity for " + name, line_no);
            arities[name] = k;
            continue;
        }
        if (!header) {
            header = name_list(line, line_no);
            continue;
        }
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != header->size())
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header->size()),
                             line_no);
        std::vector<std::uint8_t> row;
        for (const std::string& cell : cells) {
            int v = 0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size())
                throw ParseError("cell \"" + cell + "\" is not an integer", line_no);
            if (v < 0 || v > 255)
                throw ParseError("cell value " + std::to_string(v) + " is out of range", line_no);
            row.push_back(static_cast<std::uint8_t>(v));
        }
        rows.push_back(std::move(row));
        row_lines.push_back(line_no);
    }
    if (!header) throw ParseError("data file has no header row");
    std::vector<int> declared;
    for (const std::string& name : *header) {
        auto it = arities.find(name);
        if (it == arities.end())
            throw ParseError("no #arity line for column " + name);
        declared.push_back(it->second);
    }
    for (const auto& [name, k] : arities)
        if (std::find(header->begin(), header->end(), name) == header->end())
            throw ParseError("arity declared for unknown column " + name);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            if (static_cast<int>(rows[r][c]) >= declared[c])
                throw ParseError("value " + std::to_string(rows[r][c]) +
                                     " is outside the declared arity of " + (*header)[c],
                                 row_lines[r]);
    try {
        return Dataset(*header, declared, std::move(rows));
    } catch (const std::exception& e) {
        rewrap(e);
    }
}

std::string emit_dot(const Poipg& p) {
    auto decoration = [](EndpointMark m) {
        switch (m) {
            case EndpointMark::Arrow: return "normal";
            case EndpointMark::Tail: return "none";
            case EndpointMark::Circle: return "odot";
        }
        throw GraphError("unknown endpoint mark");
    };
    std::string out = "digraph poipg {\n";
    for (const std::string& n : p.names()) out += "  \"" + n + "\";\n";
    for (const PoipgEdge& e : p.edges())
        out += "  \"" + p.names()[static_cast<std::size_t>(e.a)] + "\" -> \"" +
               p.names()[static_cast<std::size_t>(e.b)] + "\" [dir=both, arrowtail=" +
               decoration(e.at_a) + ", arrowhead=" + decoration(e.at_b) + "];\n";
    out += "}\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
    if (!out) throw ParseError("cannot write " + path);
}

}  // namespace poipg
