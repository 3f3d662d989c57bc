#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hvar {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string grid_to_csv(const Grid& grid) {
    const int n = grid.dim();
    std::ostringstream out;
    out << "id";
    for (int k = 1; k <= n; ++k) out << ",x" << k;
    for (int k = 1; k <= n; ++k) out << ",y" << k;
    out << ",t,volume,label\n";
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < grid.coords().cols(); ++k)
            out << ',' << format_double(grid.coords()(i, k));
        out << ',' << format_double(grid.volume(i)) << ','
            << (grid.is_interior(i) ? "interior" : "exterior") << '\n';
    }
    return out.str();
}

void write_grid_csv(const Grid& grid, const std::string& path) {
    write_text_file(path, grid_to_csv(grid));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Grid read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty grid CSV: " + path);
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header.front() != "id" || header.back() != "label")
        throw UsageError("grid CSV: unexpected header in " + path);
    const int n = (static_cast<int>(header.size()) - 4) / 2;
    const Eigen::Index m = 2 * n + 1;

    std::vector<double> coords, volumes;
    std::vector<NodeLabel> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != m + 3)
            throw UsageError("grid CSV: malformed row in " + path);
        for (Eigen::Index k = 0; k < m; ++k) coords.push_back(std::stod(cells[1 + k]));
        volumes.push_back(std::stod(cells[1 + m]));
        if (cells.back() == "interior")
            labels.push_back(NodeLabel::Interior);
        else if (cells.back() == "exterior")
            labels.push_back(NodeLabel::Exterior);
        else
            throw UsageError("grid CSV: unknown label '" + cells.back() + "'");
    }
    const Eigen::Index count = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd cm(count, m);
    for (Eigen::Index i = 0; i < count; ++i)
        for (Eigen::Index k = 0; k < m; ++k) cm(i, k) = coords[i * m + k];
    Eigen::VectorXd vv = Eigen::Map<Eigen::VectorXd>(volumes.data(), count);
    return Grid::from_nodes(n, std::move(cm), std::move(vv), std::move(labels), 0.0, 0.0);
}

void write_form_coo(const StiffnessForm& form, const std::string& path) {
    std::ostringstream out;
    for (int k = 0; k < form.matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(form.matrix, k); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    write_text_file(path, out.str());
}

}  // namespace hvar
