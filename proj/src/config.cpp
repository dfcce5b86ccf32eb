#include "zenopure/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace zenopure {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(line, "not a finite number: '" + s + "'");
    return v;
}

long long to_integer(const std::string& s, int line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "not an integer: '" + s + "'");
    return v;
}

std::vector<Complex> to_complex_list(const std::string& s, int line) {
    const auto toks = split_ws(s);
    if (toks.size() % 2 != 0) fail(line, "expected whitespace-separated 're im' pairs");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < toks.size(); i += 2) {
        out.emplace_back(to_double(toks[i], line), to_double(toks[i + 1], line));
    }
    return out;
}

Complex to_complex(const std::string& s, int line) {
    const auto toks = split_ws(s);
    if (toks.size() == 1) return {to_double(toks[0], line), 0.0};
    if (toks.size() == 2) return {to_double(toks[0], line), to_double(toks[1], line)};
    fail(line, "expected 're' or 're im'");
}

std::string complex_text(Complex z) { return format_number(z.real()) + " " + format_number(z.imag()); }

TauSpec to_tau(const std::string& s, int line) {
    if (s.rfind("tuned", 0) != 0) {
        const double t = to_double(s, line);
        if (t < 0.0) fail(line, "tau must be >= 0");
        return t;
    }
    TunedTau tuned;
    const auto parts = split(s, ':');
    if (parts.size() > 3) fail(line, "tau must be 'tuned[:m[:plus|minus]]'");
    if (parts.size() >= 2) {
        const long long m = to_integer(parts[1], line);
        if (m < 1) fail(line, "tuned tau needs m >= 1");
        tuned.m = static_cast<int>(m);
    }
    if (parts.size() == 3) {
        if (parts[2] == "plus") tuned.branch = oscillator::Branch::plus;
        else if (parts[2] == "minus") tuned.branch = oscillator::Branch::minus;
        else fail(line, "tuned tau branch must be plus or minus");
    }
    return tuned;
}

void check_initial_state(const std::string& s, int line) {
    if (s == "thermal" || s == "maximally-mixed") return;
    for (const char* prefix : {"mixed:", "fock:"}) {
        const std::string p(prefix);
        if (s.rfind(p, 0) == 0) {
            const long long k = to_integer(s.substr(p.size()), line);
            if (k < (p == "mixed:" ? 1 : 0)) fail(line, "bad level count in '" + s + "'");
            return;
        }
    }
    fail(line, "unknown initial_state '" + s + "'");
}

const std::set<std::string> kOscillatorKeys = {"big_omega", "omega",    "g",        "alpha",
                                               "beta",      "cutoff_a", "cutoff_b", "cutoff"};
const std::set<std::string> kExplicitKeys = {"matrix_file", "matrix_kind", "probe"};
const std::set<std::string> kOutputs = {"spectrum", "purify", "compare", "zeno"};

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string section;
    std::set<std::string> seen_top, seen_model;
    int model_sections = 0;
    int kind_line = 0;
    std::string kind;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line != "[model]") fail(line_no, "unknown section " + line);
            if (++model_sections > 1) fail(line_no, "more than one [model] section");
            section = "model";
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        auto& seen = section == "model" ? seen_model : seen_top;
        if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");

        if (section.empty()) {
            if (key == "n_steps") {
                const long long n = to_integer(value, line_no);
                if (n < 1) fail(line_no, "n_steps must be >= 1");
                cfg.n_steps = static_cast<int>(n);
            } else if (key == "tau") {
                cfg.tau = to_tau(value, line_no);
            } else if (key == "outputs") {
                cfg.outputs = split(value, ',');
                for (const auto& o : cfg.outputs) {
                    if (!kOutputs.count(o)) fail(line_no, "unknown output '" + o + "'");
                }
            } else if (key == "initial_state") {
                check_initial_state(value, line_no);
                cfg.initial_state = value;
            } else if (key == "total_time") {
                const double t = to_double(value, line_no);
                if (!(t > 0.0)) fail(line_no, "total_time must be > 0");
                cfg.total_time = t;
            } else if (key == "zeno_n") {
                for (const auto& item : split(value, ',')) {
                    const long long n = to_integer(item, line_no);
                    if (n < 1) fail(line_no, "zeno_n entries must be >= 1");
                    cfg.zeno_n.push_back(static_cast<int>(n));
                }
            } else if (key == "seed") {
                const long long s = to_integer(value, line_no);
                if (s < 0) fail(line_no, "seed must be >= 0");
                cfg.seed = static_cast<std::uint64_t>(s);
            } else {
                fail(line_no, "unknown key '" + key + "'");
            }
            continue;
        }

        auto& osc = cfg.oscillator;
        if (key == "kind") {
            kind = value;
            kind_line = line_no;
        } else if (key == "big_omega") {
            osc.big_omega = to_double(value, line_no);
        } else if (key == "omega") {
            osc.omega = to_double(value, line_no);
        } else if (key == "g") {
            osc.g = to_double(value, line_no);
        } else if (key == "alpha") {
            osc.alpha = to_complex(value, line_no);
        } else if (key == "beta") {
            osc.beta = to_double(value, line_no);
            if (!(osc.beta > 0.0)) fail(line_no, "beta must be > 0");
        } else if (key == "cutoff_a" || key == "cutoff_b" || key == "cutoff") {
            const long long c = to_integer(value, line_no);
            if (c < 1) fail(line_no, key + " must be >= 1");
            if (key != "cutoff_b") osc.cutoff_a = static_cast<int>(c);
            if (key != "cutoff_a") osc.cutoff_b = static_cast<int>(c);
        } else if (key == "matrix_file") {
            cfg.matrix_file = value;
        } else if (key == "matrix_kind") {
            if (value == "hamiltonian") cfg.matrix_kind = MatrixKind::hamiltonian;
            else if (value == "propagator") cfg.matrix_kind = MatrixKind::propagator;
            else fail(line_no, "matrix_kind must be hamiltonian or propagator");
        } else if (key == "probe") {
            cfg.probe = to_complex_list(value, line_no);
            if (cfg.probe.empty()) fail(line_no, "probe must not be empty");
        } else {
            fail(line_no, "unknown model key '" + key + "'");
        }
    }

    if (model_sections == 0) fail(line_no, "missing [model] section");
    if (kind.empty()) fail(line_no, "[model] needs 'kind'");
    auto has_any = [&seen_model](const std::set<std::string>& keys) {
        for (const auto& k : keys) {
            if (seen_model.count(k)) return true;
        }
        return false;
    };
    if (kind == "oscillator") {
        cfg.model = ModelKind::oscillator;
        if (has_any(kExplicitKeys)) fail(kind_line, "oscillator model cannot also name a matrix file or probe");
    } else if (kind == "explicit-matrix") {
        cfg.model = ModelKind::explicit_matrix;
        if (has_any(kOscillatorKeys)) fail(kind_line, "explicit-matrix model cannot also set oscillator parameters");
        if (cfg.matrix_file.empty()) fail(kind_line, "explicit-matrix model needs matrix_file");
        if (cfg.probe.empty()) fail(kind_line, "explicit-matrix model needs probe");
        if (std::holds_alternative<TunedTau>(cfg.tau) && seen_top.count("tau")) {
            fail(kind_line, "tuned tau is only defined for the oscillator model");
        }
        if (!seen_top.count("tau")) cfg.tau = 1.0;
        if (!seen_top.count("initial_state")) cfg.initial_state = "maximally-mixed";
        if (cfg.initial_state == "thermal") fail(kind_line, "thermal initial state needs the oscillator model");
    } else {
        fail(kind_line, "unknown model kind '" + kind + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    if (cfg.model == ModelKind::explicit_matrix) {
        const std::filesystem::path m(cfg.matrix_file);
        if (m.is_relative()) cfg.matrix_file = (path.parent_path() / m).lexically_normal().string();
    }
    return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "n_steps = " << cfg.n_steps << "\n";
    if (const auto* t = std::get_if<double>(&cfg.tau)) {
        out << "tau = " << format_number(*t) << "\n";
    } else {
        const auto& tuned = std::get<TunedTau>(cfg.tau);
        out << "tau = tuned:" << tuned.m << ":"
            << (tuned.branch == oscillator::Branch::plus ? "plus" : "minus") << "\n";
    }
    if (!cfg.outputs.empty()) {
        out << "outputs = ";
        for (std::size_t i = 0; i < cfg.outputs.size(); ++i) out << (i ? "," : "") << cfg.outputs[i];
        out << "\n";
    }
    out << "initial_state = " << cfg.initial_state << "\n";
    if (cfg.total_time) out << "total_time = " << format_number(*cfg.total_time) << "\n";
    if (!cfg.zeno_n.empty()) {
        out << "zeno_n = ";
        for (std::size_t i = 0; i < cfg.zeno_n.size(); ++i) out << (i ? "," : "") << cfg.zeno_n[i];
        out << "\n";
    }
    out << "seed = " << cfg.seed << "\n\n[model]\n";
    if (cfg.model == ModelKind::oscillator) {
        const auto& p = cfg.oscillator;
        out << "kind = oscillator\n"
            << "big_omega = " << format_number(p.big_omega) << "\n"
            << "omega = " << format_number(p.omega) << "\n"
            << "g = " << format_number(p.g) << "\n"
            << "alpha = " << complex_text(p.alpha) << "\n"
            << "beta = " << format_number(p.beta) << "\n"
            << "cutoff_a = " << p.cutoff_a << "\n"
            << "cutoff_b = " << p.cutoff_b << "\n";
    } else {
        out << "kind = explicit-matrix\n"
            << "matrix_file = " << cfg.matrix_file << "\n"
            << "matrix_kind = " << (cfg.matrix_kind == MatrixKind::hamiltonian ? "hamiltonian" : "propagator")
            << "\nprobe =";
        for (const auto& z : cfg.probe) out << " " << complex_text(z);
        out << "\n";
    }
    return out.str();
}

MatrixFile parse_matrix_file(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    do {
        if (!std::getline(in, header)) throw ConfigError("matrix file: missing 'dim_a dim_b' header");
        header = trim(header);
    } while (header.empty());
    const auto dims = split_ws(header);
    if (dims.size() != 2) throw ConfigError("matrix file: header must be 'dim_a dim_b'");
    MatrixFile out;
    out.dim_a = to_integer(dims[0], 1);
    out.dim_b = to_integer(dims[1], 1);
    if (out.dim_a < 1 || out.dim_b < 1) throw ConfigError("matrix file: dimensions must be positive");
    const Index dim = out.dim_a * out.dim_b;
    if (dim > kMaxDimension) throw ConfigError("matrix file: dimension exceeds limit");
    std::vector<std::string> toks;
    std::string tok;
    while (in >> tok) toks.push_back(tok);
    const auto expected = static_cast<std::size_t>(2 * dim * dim);
    if (toks.size() != expected) {
        throw ConfigError("matrix file: expected " + std::to_string(expected) + " numbers, found " +
                          std::to_string(toks.size()));
    }
    out.matrix.resize(dim, dim);
    std::size_t t = 0;
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j, t += 2) {
            out.matrix(i, j) = Complex(to_double(toks[t], 2), to_double(toks[t + 1], 2));
        }
    }
    return out;
}

MatrixFile load_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_matrix_file(buf.str());
}

std::string emit_matrix_file(const MatrixFile& file) {
    std::ostringstream out;
    out << file.dim_a << " " << file.dim_b << "\n";
    for (Index i = 0; i < file.matrix.rows(); ++i) {
        for (Index j = 0; j < file.matrix.cols(); ++j) {
            out << (j ? "  " : "") << complex_text(file.matrix(i, j));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace zenopure
