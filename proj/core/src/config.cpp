#include "brwlab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace brwlab {

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ReturnSeries: return "return-series";
        case ExperimentKind::SpectralFit: return "spectral-fit";
        case ExperimentKind::CriticalitySum: return "criticality-sum";
        case ExperimentKind::TwoWalkSum: return "two-walk-sum";
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::ManyToOne: return "many-to-one";
        case ExperimentKind::Purple: return "purple";
        case ExperimentKind::Ends: return "ends";
        case ExperimentKind::Fiber: return "fiber";
        case ExperimentKind::EmbeddedGw: return "embedded-gw";
    }
    return "?";
}

ExperimentKind kind_from_string(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::EmbeddedGw); ++k) {
        auto kind = static_cast<ExperimentKind>(k);
        if (name == kind_name(kind)) return kind;
    }
    throw ConfigError("unknown experiment kind '" + name + "'");
}

// --------------------------------------------------------------------------
// Tiny recursive-descent parser over the expression grammar:
//   graph  := t(INT) | z | hammock | product(graph,...) | glue(graph,...)
//   kernel := simple | lazy(kernel, NUM) | biasedline(NUM) | heightbiased(NUM)
//           | product(NUM: kernel @ INT, ...)
//   mu     := critical | critical(NUM) | INT | {INT: NUM, ...}
// NUM accepts integers, fractions (7/10) and decimals (0.7), kept exact.

namespace {

struct Lexer {
    std::string s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            throw ConfigError(std::string("expected '") + c + "' in '" + s + "' at position " +
                              std::to_string(pos));
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '-'))
            ++pos;
        if (start == pos) throw ConfigError("expected a name in '" + s + "'");
        return s.substr(start, pos - start);
    }
    std::string number_text() {
        skip_ws();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == '/'))
            ++pos;
        if (start == pos) throw ConfigError("expected a number in '" + s + "'");
        return s.substr(start, pos - start);
    }
    Rational number() { return rational_from_string(number_text()); }
    long integer() {
        auto q = number();
        if (denominator(q) != 1) throw ConfigError("expected an integer in '" + s + "'");
        return static_cast<long>(numerator(q).convert_to<long long>());
    }
};

GraphFamily parse_graph(Lexer& lx);

std::vector<GraphFamily> parse_graph_list(Lexer& lx) {
    std::vector<GraphFamily> out;
    lx.expect('(');
    out.push_back(parse_graph(lx));
    while (lx.accept(',')) out.push_back(parse_graph(lx));
    lx.expect(')');
    return out;
}

GraphFamily parse_graph(Lexer& lx) {
    std::string name = lx.ident();
    if (name == "t") {
        lx.expect('(');
        long d = lx.integer();
        lx.expect(')');
        return hom_tree(static_cast<int>(d));
    }
    if (name == "z") return line();
    if (name == "hammock") return hammock();
    if (name == "product") return product(parse_graph_list(lx));
    if (name == "glue") {
        auto parts = parse_graph_list(lx);
        std::vector<VertexAddr> basepoints;
        for (const auto& p : parts) basepoints.push_back(origin(p));
        return glue(std::move(parts), std::move(basepoints));
    }
    throw ConfigError("unknown graph '" + name + "'");
}

KernelSpec parse_kernel(Lexer& lx) {
    std::string name = lx.ident();
    if (name == "simple") return simple_kernel();
    if (name == "lazy") {
        lx.expect('(');
        KernelSpec base = parse_kernel(lx);
        lx.expect(',');
        Rational stay = lx.number();
        lx.expect(')');
        return lazy_kernel(std::move(base), std::move(stay));
    }
    if (name == "biasedline") {
        lx.expect('(');
        Rational p = lx.number();
        lx.expect(')');
        return biased_line_kernel(std::move(p));
    }
    if (name == "heightbiased") {
        lx.expect('(');
        Rational p = lx.number();
        lx.expect(')');
        return height_biased_kernel(std::move(p));
    }
    if (name == "product") {
        lx.expect('(');
        std::vector<std::pair<KernelSpec, Rational>> factors;
        while (true) {
            Rational w = lx.number();
            lx.expect(':');
            KernelSpec k = parse_kernel(lx);
            if (lx.accept('@')) {
                long idx = lx.integer();
                if (idx != static_cast<long>(factors.size()) + 1)
                    throw ConfigError("product factor index @" + std::to_string(idx) +
                                      " out of order");
            }
            factors.emplace_back(std::move(k), std::move(w));
            if (!lx.accept(',')) break;
        }
        lx.expect(')');
        return product_kernel(std::move(factors));
    }
    throw ConfigError("unknown kernel '" + name + "'");
}

MuSpec parse_mu(Lexer& lx) {
    MuSpec mu;
    if (lx.peek() == '{') {
        lx.expect('{');
        mu.critical = false;
        while (true) {
            long k = lx.integer();
            lx.expect(':');
            Rational p = lx.number();
            mu.entries.emplace_back(static_cast<int>(k), to_double(p));
            if (!lx.accept(',')) break;
        }
        lx.expect('}');
        return mu;
    }
    if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
        long k = lx.integer();
        mu.critical = false;
        mu.entries.emplace_back(static_cast<int>(k), 1.0);
        return mu;
    }
    std::string name = lx.ident();
    if (name != "critical") throw ConfigError("unknown offspring law '" + name + "'");
    mu.critical = true;
    if (lx.accept('(')) {
        mu.scale = to_double(lx.number());
        lx.expect(')');
    }
    return mu;
}

template <class Fn>
auto parse_full(const std::string& text, Fn&& fn) {
    Lexer lx{text};
    auto out = fn(lx);
    if (!lx.eof()) throw ConfigError("trailing input in '" + text + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

GraphFamily parse_graph_expr(const std::string& text) {
    return parse_full(text, [](Lexer& lx) { return parse_graph(lx); });
}

KernelSpec parse_kernel_expr(const std::string& text) {
    return parse_full(text, [](Lexer& lx) { return parse_kernel(lx); });
}

MuSpec parse_mu_expr(const std::string& text) {
    return parse_full(text, [](Lexer& lx) { return parse_mu(lx); });
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    bool have_kind = false;
    while (std::getline(in, raw)) {
        std::string lines = raw;
        auto hash = lines.find('#');
        if (hash != std::string::npos) lines = lines.substr(0, hash);
        lines = trim(lines);
        if (lines.empty()) continue;
        auto eq = lines.find('=');
        if (eq == std::string::npos) throw ConfigError("expected `key = value`: " + raw);
        std::string key = trim(lines.substr(0, eq));
        std::string value = trim(lines.substr(eq + 1));
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'");

        if (key == "experiment") {
            cfg.kind = kind_from_string(value);
            have_kind = true;
        } else if (key == "graph") {
            cfg.graph = parse_graph_expr(value);
        } else if (key == "kernel") {
            cfg.kernel = parse_kernel_expr(value);
        } else if (key == "mu") {
            cfg.mu = parse_mu_expr(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "mode") {
            if (value == "float") {
                cfg.mode = ArithmeticMode::Float;
            } else if (value == "rational") {
                cfg.mode = ArithmeticMode::Rational;
            } else {
                throw ConfigError("mode must be float or rational");
            }
        } else if (key == "n") {
            cfg.horizon = std::stoi(value);
        } else if (key == "generations") {
            cfg.generations = std::stoi(value);
        } else if (key == "reps") {
            cfg.reps = std::stoull(value);
        } else if (key == "radii") {
            cfg.radii.clear();
            for (const auto& part : split_list(value)) cfg.radii.push_back(std::stoll(trim(part)));
        } else if (key == "horizons") {
            cfg.horizons.clear();
            for (const auto& part : split_list(value)) cfg.horizons.push_back(std::stoi(trim(part)));
        } else if (key == "source_i") {
            cfg.source_i = addr_from_string(value);
        } else if (key == "source_j") {
            cfg.source_j = addr_from_string(value);
        } else if (key == "target") {
            cfg.target = addr_from_string(value);
        } else if (key == "fiber") {
            cfg.fiber = addr_from_string(value);
        } else if (key == "lag") {
            cfg.lag = (value == "auto") ? 0 : std::stoi(value);
        } else if (key == "lags") {
            cfg.lags = std::stoi(value);
        } else if (key == "rho") {
            cfg.rho_override = (value == "auto") ? std::optional<double>() : std::stod(value);
        } else if (key == "population_cap") {
            cfg.population_cap = std::stoull(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (!have_kind) throw ConfigError("config must set `experiment = <kind>`");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "experiment = " << kind_name(c.kind) << "\n";
    os << "graph = " << graph_to_string(c.graph) << "\n";
    os << "kernel = " << kernel_to_string(c.kernel) << "\n";
    if (c.mu.critical) {
        os << "mu = critical";
        if (c.mu.scale != 1.0) os << "(" << c.mu.scale << ")";
        os << "\n";
    } else {
        os << "mu = {";
        for (std::size_t i = 0; i < c.mu.entries.size(); ++i) {
            if (i) os << ", ";
            os << c.mu.entries[i].first << ": " << c.mu.entries[i].second;
        }
        os << "}\n";
    }
    os << "seed = " << c.seed << "\n";
    os << "mode = " << (c.mode == ArithmeticMode::Float ? "float" : "rational") << "\n";
    os << "n = " << c.horizon << "\n";
    os << "generations = " << c.generations << "\n";
    os << "reps = " << c.reps << "\n";
    os << "radii = ";
    for (std::size_t i = 0; i < c.radii.size(); ++i) os << (i ? ", " : "") << c.radii[i];
    os << "\n";
    if (!c.horizons.empty()) {
        os << "horizons = ";
        for (std::size_t i = 0; i < c.horizons.size(); ++i) os << (i ? ", " : "") << c.horizons[i];
        os << "\n";
    }
    if (c.source_i) os << "source_i = " << to_string(*c.source_i) << "\n";
    if (c.source_j) os << "source_j = " << to_string(*c.source_j) << "\n";
    if (c.target) os << "target = " << to_string(*c.target) << "\n";
    if (c.fiber) os << "fiber = " << to_string(*c.fiber) << "\n";
    os << "lag = " << (c.lag == 0 ? std::string("auto") : std::to_string(c.lag)) << "\n";
    os << "lags = " << c.lags << "\n";
    if (c.rho_override) os << "rho = " << *c.rho_override << "\n";
    os << "population_cap = " << c.population_cap << "\n";
    return os.str();
}

} // namespace brwlab
