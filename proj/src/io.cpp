#include "bundlechoice/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bundlechoice {

namespace {
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row) {
    if (s.empty())
        throw std::invalid_argument("panel csv: missing value at row " + std::to_string(row));
    size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("panel csv: bad number '" + s + "' at row " +
                                    std::to_string(row));
    }
    if (pos != s.size())
        throw std::invalid_argument("panel csv: trailing characters in '" + s + "' at row " +
                                    std::to_string(row));
    if (!std::isfinite(v))
        throw std::invalid_argument("panel csv: non-finite value at row " + std::to_string(row));
    return v;
}
}  // namespace

std::string panel_to_csv(const ObservationPanel& panel) {
    std::ostringstream os;
    os << "id,t,y";
    for (int k = 1; k <= panel.d_x; ++k) os << ",xA_" << k;
    for (int k = 1; k <= panel.d_x; ++k) os << ",xB_" << k;
    for (int k = 1; k <= panel.d_z; ++k) os << ",z_" << k;
    os << "\n";
    for (int i = 0; i < panel.n; ++i)
        for (int t = 0; t < panel.t_len; ++t) {
            os << i << ',' << t << ',' << to_string(panel.y[i][t]);
            for (int g = 0; g < 2; ++g)
                for (int k = 0; k < panel.d_x; ++k) os << ',' << fmt_double(panel.x[i][t][g][k]);
            for (int k = 0; k < panel.d_z; ++k) os << ',' << fmt_double(panel.z[i][k]);
            os << "\n";
        }
    return os.str();
}

ObservationPanel panel_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("panel csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line, ',');
    int d_x = 0, d_z = 0;
    for (const auto& h : header) {
        if (h.rfind("xA_", 0) == 0) ++d_x;
        if (h.rfind("z_", 0) == 0) ++d_z;
    }
    if (header.size() < 3 || header[0] != "id" || header[1] != "t" || header[2] != "y" ||
        d_x == 0 || d_z == 0)
        throw std::invalid_argument("panel csv: unrecognized header");
    const size_t expected = 3 + 2 * static_cast<size_t>(d_x) + d_z;
    if (header.size() != expected)
        throw std::invalid_argument("panel csv: header has wrong number of columns");

    struct Row {
        int id, t;
        Choice y;
        std::array<Vec, 2> x;
        Vec z;
    };
    std::vector<Row> rows;
    int line_no = 1;
    int max_id = -1, max_t = -1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != expected)
            throw std::invalid_argument("panel csv: wrong field count at row " +
                                        std::to_string(line_no));
        Row r;
        r.id = static_cast<int>(parse_double(f[0], line_no));
        r.t = static_cast<int>(parse_double(f[1], line_no));
        r.y = choice_from_string(f[2]);
        r.x[0].resize(d_x);
        r.x[1].resize(d_x);
        r.z.resize(d_z);
        size_t col = 3;
        for (int g = 0; g < 2; ++g)
            for (int k = 0; k < d_x; ++k) r.x[g][k] = parse_double(f[col++], line_no);
        for (int k = 0; k < d_z; ++k) r.z[k] = parse_double(f[col++], line_no);
        max_id = std::max(max_id, r.id);
        max_t = std::max(max_t, r.t);
        rows.push_back(std::move(r));
    }

    ObservationPanel panel;
    panel.n = max_id + 1;
    panel.t_len = max_t + 1;
    panel.d_x = d_x;
    panel.d_z = d_z;
    panel.z.assign(panel.n, Vec(d_z));
    panel.x.assign(panel.n, std::vector<std::array<Vec, 2>>(panel.t_len));
    panel.y.assign(panel.n, std::vector<Choice>(panel.t_len, Choice::O));
    std::vector<std::vector<bool>> seen(panel.n, std::vector<bool>(panel.t_len, false));
    for (const auto& r : rows) {
        if (r.id < 0 || r.t < 0) throw std::invalid_argument("panel csv: negative id or t");
        panel.x[r.id][r.t] = r.x;
        panel.y[r.id][r.t] = r.y;
        panel.z[r.id] = r.z;
        seen[r.id][r.t] = true;
    }
    for (int i = 0; i < panel.n; ++i)
        for (int t = 0; t < panel.t_len; ++t)
            if (!seen[i][t])
                throw std::invalid_argument("panel csv: missing row for id " + std::to_string(i) +
                                            " t " + std::to_string(t));
    panel.validate();
    return panel;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace bundlechoice
