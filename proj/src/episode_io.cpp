#include "der/episode_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace der {

namespace {

void write_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    out << buf;
}

double read_double(std::istringstream& in, int lineno) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("episode line " + std::to_string(lineno) + ": short line");
    return std::strtod(tok.c_str(), nullptr);
}

}  // namespace

void write_episode(std::ostream& out, const Episode& e) {
    for (const auto& t : e.transitions) {
        for (double v : t.s.data) {
            write_double(out, v);
            out << ' ';
        }
        for (double v : t.a.data) {
            write_double(out, v);
            out << ' ';
        }
        for (double v : t.s_next.data) {
            write_double(out, v);
            out << ' ';
        }
        write_double(out, t.r);
        out << ' ' << (t.done ? 1 : 0) << ' ' << (t.success ? 1 : 0) << '\n';
    }
    out << '\n';
}

Episode read_episode(std::istream& in) {
    std::vector<Transition> ts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            if (ts.empty()) continue;  // tolerate leading blank lines
            break;
        }
        std::istringstream ls(line);
        Transition t;
        // raw assignment: values were normalized at write time, re-running the
        // quaternion normalization would perturb bits
        for (double& v : t.s.data) v = read_double(ls, lineno);
        for (double& v : t.a.data) v = read_double(ls, lineno);
        for (double& v : t.s_next.data) v = read_double(ls, lineno);
        t.r = read_double(ls, lineno);
        int done = 0, success = 0;
        if (!(ls >> done >> success))
            throw std::runtime_error("episode line " + std::to_string(lineno) + ": missing flags");
        t.done = done != 0;
        t.success = success != 0;
        t.check();
        ts.push_back(t);
    }
    if (ts.empty()) throw std::runtime_error("read_episode: no transitions");
    return Episode::from_transitions(std::move(ts));
}

void save_episodes(const std::string& path, const std::vector<Episode>& eps) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    for (const auto& e : eps) write_episode(out, e);
}

std::vector<Episode> load_episodes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<Episode> eps;
    while (true) {
        // skip blank separators and detect EOF
        int c = in.peek();
        while (c == '\n' || c == '\r') {
            in.get();
            c = in.peek();
        }
        if (c == EOF) break;
        eps.push_back(read_episode(in));
    }
    return eps;
}

}  // namespace der
