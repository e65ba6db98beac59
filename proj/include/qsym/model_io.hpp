#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"

namespace qsym {

struct SourceLocation {
    int line = 0; // 1-based
    int column = 0;
};

struct parse_error : error {
    SourceLocation where;
    parse_error(const std::string& msg, SourceLocation loc)
        : error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg),
          where(loc) {}
};

/// Parsed model plus the source location of every declaration, keyed for
/// diagnostics ("space", "weight", "group:NAME", "experiment:NAME",
/// "row:NAME:T").
struct ModelDocument {
    Ensemble ensemble;
    std::map<std::string, SourceLocation> locations;
    ValidationReport validation;

    SourceLocation locate(const std::string& key) const {
        auto it = locations.find(key);
        return it == locations.end() ? SourceLocation{} : it->second;
    }
};

namespace detail {

struct Token {
    std::string text;
    SourceLocation loc;
};

inline std::vector<std::vector<Token>> tokenize_lines(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) { ++i; continue; }
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && raw[i] != '#')
                ++i;
            toks.push_back({raw.substr(start, i - start),
                            {lineno, static_cast<int>(start) + 1}});
        }
        lines.push_back(std::move(toks));
    }
    return lines;
}

inline int parse_int(const Token& t) {
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
        throw parse_error("expected an integer, got '" + t.text + "'", t.loc);
    return v;
}

inline double parse_number(const Token& t) {
    try {
        std::size_t used = 0;
        double v = std::stod(t.text, &used);
        if (used != t.text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw parse_error("expected a number, got '" + t.text + "'", t.loc);
    }
}

// "NAME:" or "NAME" followed by a lone ":".
inline std::string take_name_colon(const std::vector<Token>& toks, std::size_t& i) {
    std::string name = toks[i].text;
    if (!name.empty() && name.back() == ':') {
        name.pop_back();
        ++i;
    } else {
        ++i;
        if (i < toks.size() && toks[i].text == ":") ++i;
    }
    if (name.empty()) throw parse_error("expected a name before ':'", toks[i - 1].loc);
    return name;
}

} // namespace detail

/// Parses the line-oriented model format:
///
///   space N
///   weight w0 ... w{N-1}
///   group NAME: i0 i1 ... i{N-1}
///   experiment NAME
///     outcomes M
///     theta t0 ... t{N-1}
///     row T: p0 ... p{M-1}
///   end
///
/// '#' starts a comment. Syntax problems throw parse_error with line/column;
/// semantic problems land in the returned validation report.
inline ModelDocument parse_model(const std::string& text) {
    auto lines = detail::tokenize_lines(text);
    ModelDocument doc;
    Ensemble& e = doc.ensemble;
    e.space.n = -1;
    std::vector<std::pair<std::string, Perm>> generators;

    Experiment* current = nullptr;
    std::map<int, std::vector<double>> current_rows;
    std::vector<int> current_theta;
    bool theta_seen = false;
    SourceLocation exp_loc;

    auto finish_experiment = [&](SourceLocation loc) {
        if (!current) return;
        if (!theta_seen)
            throw parse_error("experiment '" + current->name + "' has no theta declaration", loc);
        current->theta = ParametricFunction(current_theta);
        int labels = 0;
        for (int v : current_theta) labels = std::max(labels, v + 1);
        current->prob_table.assign(labels, {});
        for (auto& [t, row] : current_rows) {
            if (t < 0 || t >= labels)
                throw parse_error("row label " + std::to_string(t) +
                                      " outside the theta label range of experiment '" + current->name + "'",
                                  doc.locate("row:" + current->name + ":" + std::to_string(t)));
            current->prob_table[t] = std::move(row);
        }
        for (int t = 0; t < labels; ++t)
            if (current->prob_table[t].empty())
                throw parse_error("experiment '" + current->name + "' is missing row " + std::to_string(t),
                                  exp_loc);
        current = nullptr;
        current_rows.clear();
        current_theta.clear();
        theta_seen = false;
    };

    for (const auto& toks : lines) {
        if (toks.empty()) continue;
        const detail::Token& head = toks.front();
        const std::string& kw = head.text;

        if (kw == "space") {
            if (toks.size() != 2) throw parse_error("usage: space N", head.loc);
            e.space.n = detail::parse_int(toks[1]);
            if (e.space.n < 1) throw parse_error("state space size must be >= 1", toks[1].loc);
            if (e.space.nu.empty()) e.space.nu.assign(e.space.n, 1.0);
            doc.locations["space"] = head.loc;
        } else if (kw == "weight") {
            if (e.space.n < 0) throw parse_error("weight before space declaration", head.loc);
            if (static_cast<int>(toks.size()) != e.space.n + 1)
                throw parse_error("expected " + std::to_string(e.space.n) + " weights", head.loc);
            e.space.nu.clear();
            for (int i = 0; i < e.space.n; ++i) e.space.nu.push_back(detail::parse_number(toks[i + 1]));
            doc.locations["weight"] = head.loc;
        } else if (kw == "group") {
            if (e.space.n < 0) throw parse_error("group before space declaration", head.loc);
            if (toks.size() < 2) throw parse_error("usage: group NAME: i0 i1 ...", head.loc);
            std::size_t i = 1;
            std::string name = detail::take_name_colon(toks, i);
            if (static_cast<int>(toks.size() - i) != e.space.n)
                throw parse_error("generator '" + name + "' needs " + std::to_string(e.space.n) +
                                      " images",
                                  head.loc);
            Perm p;
            for (; i < toks.size(); ++i) p.push_back(detail::parse_int(toks[i]));
            if (!is_bijection(p))
                throw parse_error("generator '" + name + "' is not a bijection", head.loc);
            generators.emplace_back(name, std::move(p));
            doc.locations["group:" + name] = head.loc;
        } else if (kw == "experiment") {
            if (current) throw parse_error("nested experiment declaration", head.loc);
            if (e.space.n < 0) throw parse_error("experiment before space declaration", head.loc);
            if (toks.size() != 2) throw parse_error("usage: experiment NAME", head.loc);
            e.experiments.emplace_back();
            current = &e.experiments.back();
            current->name = toks[1].text;
            exp_loc = head.loc;
            doc.locations["experiment:" + current->name] = head.loc;
        } else if (kw == "outcomes") {
            if (!current) throw parse_error("outcomes outside an experiment block", head.loc);
            if (toks.size() != 2) throw parse_error("usage: outcomes M", head.loc);
            current->outcome_count = detail::parse_int(toks[1]);
            if (current->outcome_count < 1)
                throw parse_error("outcome count must be >= 1", toks[1].loc);
        } else if (kw == "theta") {
            if (!current) throw parse_error("theta outside an experiment block", head.loc);
            if (static_cast<int>(toks.size()) != e.space.n + 1)
                throw parse_error("theta needs one label per state (" + std::to_string(e.space.n) + ")",
                                  head.loc);
            current_theta.clear();
            for (int i = 0; i < e.space.n; ++i) current_theta.push_back(detail::parse_int(toks[i + 1]));
            theta_seen = true;
        } else if (kw == "row") {
            if (!current) throw parse_error("row outside an experiment block", head.loc);
            if (current->outcome_count < 1)
                throw parse_error("row before the outcomes declaration", head.loc);
            if (toks.size() < 2) throw parse_error("usage: row T: p0 p1 ...", head.loc);
            std::size_t i = 1;
            std::string label_text = detail::take_name_colon(toks, i);
            int label = 0;
            {
                auto [p, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
                if (ec != std::errc{} || p != label_text.data() + label_text.size())
                    throw parse_error("row label must be an integer, got '" + label_text + "'", toks[1].loc);
            }
            if (static_cast<int>(toks.size() - i) != current->outcome_count)
                throw parse_error("row needs " + std::to_string(current->outcome_count) + " entries",
                                  head.loc);
            std::vector<double> row;
            for (; i < toks.size(); ++i) row.push_back(detail::parse_number(toks[i]));
            if (current_rows.count(label))
                throw parse_error("duplicate row for label " + std::to_string(label), head.loc);
            doc.locations["row:" + current->name + ":" + std::to_string(label)] = head.loc;
            current_rows[label] = std::move(row);
        } else if (kw == "end") {
            if (!current) throw parse_error("'end' without an open experiment block", head.loc);
            finish_experiment(head.loc);
        } else {
            throw parse_error("unknown keyword '" + kw + "'", head.loc);
        }
    }
    if (current) throw parse_error("experiment '" + current->name + "' is missing 'end'", exp_loc);
    if (e.space.n < 0) throw parse_error("model has no space declaration", {1, 1});

    std::vector<Perm> gens;
    for (auto& [name, p] : generators) gens.push_back(p);
    if (gens.empty()) gens.push_back(identity_perm(e.space.n));
    e.group = close_group(e.space.n, gens);

    doc.validation = validate_ensemble(e);
    return doc;
}

/// Canonical text form; numbers are emitted with shortest exact round-trip.
inline std::string serialize_model(const Ensemble& e) {
    std::ostringstream out;
    out << "space " << e.space.n << "\n";
    bool uniform = true;
    for (double w : e.space.nu)
        if (w != 1.0) uniform = false;
    if (!uniform) {
        out << "weight";
        for (double w : e.space.nu) out << " " << format_double(w);
        out << "\n";
    }
    for (std::size_t i = 0; i < e.group.generators.size(); ++i) {
        const Perm& g = e.group.generators[i];
        if (g == identity_perm(e.space.n) && e.group.generators.size() == 1) continue;
        out << "group g" << i << ":";
        for (int v : g) out << " " << v;
        out << "\n";
    }
    for (const Experiment& ex : e.experiments) {
        out << "experiment " << ex.name << "\n";
        out << "  outcomes " << ex.outcome_count << "\n";
        out << "  theta";
        for (int v : ex.theta.values) out << " " << v;
        out << "\n";
        for (std::size_t t = 0; t < ex.prob_table.size(); ++t) {
            out << "  row " << t << ":";
            for (double p : ex.prob_table[t]) out << " " << format_double(p);
            out << "\n";
        }
        out << "end\n";
    }
    return out.str();
}

inline bool ensembles_equal(const Ensemble& a, const Ensemble& b) {
    if (a.space.n != b.space.n || a.space.nu != b.space.nu) return false;
    if (a.group.elements != b.group.elements) return false;
    if (a.experiments.size() != b.experiments.size()) return false;
    for (std::size_t i = 0; i < a.experiments.size(); ++i) {
        const Experiment &x = a.experiments[i], &y = b.experiments[i];
        if (x.name != y.name || x.outcome_count != y.outcome_count) return false;
        if (x.theta.values != y.theta.values) return false;
        if (x.prob_table != y.prob_table) return false;
    }
    return true;
}

} // namespace qsym
