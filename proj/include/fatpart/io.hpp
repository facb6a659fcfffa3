#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fatpart/errors.hpp"
#include "fatpart/geometry.hpp"
#include "fatpart/hierarchy.hpp"
#include "fatpart/metric.hpp"
#include "fatpart/partition.hpp"
#include "fatpart/slack.hpp"
#include "fatpart/ultrametric.hpp"
#include "fatpart/util.hpp"

namespace fatpart {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return std::move(buf).str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

namespace detail {

inline void append_json_string(std::string& out, std::string_view s) {
    out += '"';
    for (const char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    static const char* hex = "0123456789abcdef";
                    out += "\\u00";
                    out += hex[c >> 4];
                    out += hex[c & 0xf];
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

inline void append_point(std::string& out, const Vec2& p) {
    out += '[';
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ']';
}

inline void append_double_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    out += ']';
}

inline double json_number(const nlohmann::json& j, const char* what) {
    if (!j.is_number()) throw MalformedDocument(std::string(what) + " must be a number");
    return j.get<double>();
}

} // namespace detail

/// Serializes a tree as nested objects: leaves carry "weight", internal nodes
/// carry "children". Weights are the normalized ones.
template <typename Tree>
std::string write_tree_json(const Tree& tree) {
    detail::require(tree.root >= 0, "tree has no root");
    std::string out;
    struct Frame {
        int id;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({tree.root});
    bool opening = true;
    while (!stack.empty()) {
        Frame& top = stack.back();
        const TreeNode& node = tree.node(top.id);
        if (opening) {
            out += "{\"name\":";
            detail::append_json_string(out, node.name);
            if (node.is_leaf()) {
                out += ",\"weight\":";
                out += format_double(node.weight);
                out += '}';
                stack.pop_back();
                opening = false;
                continue;
            }
            out += ",\"children\":[";
        }
        if (top.next_child < node.children.size()) {
            if (top.next_child) out += ',';
            const int child = node.children[top.next_child];
            ++top.next_child;
            stack.push_back({child});
            opening = true;
        } else {
            out += "]}";
            stack.pop_back();
            opening = false;
        }
    }
    out += '\n';
    return out;
}

/// One entry per node of the partitioned binary tree, preorder.
inline std::string write_partition_json(const BinaryTree& tree, const PolygonalPartition& part) {
    detail::internal_check(part.polygons.size() == tree.node_count(),
                           "partition does not cover the tree");
    std::string out = "{\"method\":";
    detail::append_json_string(out, method_name(part.method));
    out += ",\"entries\":[";
    for (std::size_t id = 0; id < tree.node_count(); ++id) {
        if (id) out += ',';
        out += "{\"path\":";
        detail::append_json_string(out, node_path(tree, static_cast<int>(id)));
        out += ",\"depth\":";
        out += std::to_string(part.depths[id]);
        out += ",\"polygon\":[";
        const ConvexPolygon& poly = part.polygons[id];
        for (std::size_t v = 0; v < poly.size(); ++v) {
            if (v) out += ',';
            detail::append_point(out, poly[v]);
        }
        out += "],\"weight\":";
        out += format_double(tree.node(static_cast<int>(id)).weight);
        out += '}';
    }
    out += "]}\n";
    return out;
}

struct LoadedPartitionEntry {
    std::string path;
    int depth = 0;
    ConvexPolygon polygon;
    double weight = 0.0;
};

struct LoadedPartition {
    Method method = Method::angular;
    std::vector<LoadedPartitionEntry> entries;
};

inline LoadedPartition read_partition_json(std::string_view text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw MalformedDocument("invalid partition JSON");
    if (!doc.contains("method") || !doc["method"].is_string() || !doc.contains("entries") ||
        !doc["entries"].is_array()) {
        throw MalformedDocument("partition JSON needs \"method\" and \"entries\"");
    }
    LoadedPartition out;
    const auto method = parse_method(doc["method"].get<std::string>());
    if (!method) throw MalformedDocument("unknown method: " + doc["method"].get<std::string>());
    out.method = *method;
    for (const auto& e : doc["entries"]) {
        if (!e.is_object() || !e.contains("path") || !e["path"].is_string() ||
            !e.contains("depth") || !e.contains("polygon") || !e["polygon"].is_array() ||
            !e.contains("weight")) {
            throw MalformedDocument("malformed partition entry");
        }
        LoadedPartitionEntry entry;
        entry.path = e["path"].get<std::string>();
        entry.depth = static_cast<int>(detail::json_number(e["depth"], "depth"));
        entry.weight = detail::json_number(e["weight"], "weight");
        for (const auto& pt : e["polygon"]) {
            if (!pt.is_array() || pt.size() != 2) throw MalformedDocument("malformed vertex");
            entry.polygon.vertices.push_back(
                {detail::json_number(pt[0], "x"), detail::json_number(pt[1], "y")});
        }
        if (entry.polygon.size() < 3) throw MalformedDocument("polygon needs at least 3 vertices");
        out.entries.push_back(std::move(entry));
    }
    if (out.entries.empty()) throw MalformedDocument("partition has no entries");
    return out;
}

/// Leaf cells as filled polygons, optionally with internal-node outlines.
/// SVG y grows downward, so coordinates are flipped about y = 1/2.
inline std::string write_partition_svg(const BinaryTree& tree, const PolygonalPartition& part,
                                       bool internal_outlines = false) {
    detail::internal_check(part.polygons.size() == tree.node_count(),
                           "partition does not cover the tree");
    static const std::array<const char*, 12> palette = {
        "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
        "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n";
    auto append_polygon = [&out](const ConvexPolygon& poly, const char* fill) {
        out += "<polygon points=\"";
        for (std::size_t v = 0; v < poly.size(); ++v) {
            if (v) out += ' ';
            out += format_double(poly[v].x);
            out += ',';
            out += format_double(1.0 - poly[v].y);
        }
        out += "\" fill=\"";
        out += fill;
        out += "\" stroke=\"#000000\" stroke-width=\"0.001\"/>\n";
    };
    for (std::size_t id = 0; id < tree.node_count(); ++id) {
        if (!tree.node(static_cast<int>(id)).is_leaf()) continue;
        append_polygon(part.polygons[id],
                       palette[static_cast<std::size_t>(part.depths[id]) % palette.size()]);
    }
    if (internal_outlines) {
        for (std::size_t id = 0; id < tree.node_count(); ++id) {
            if (tree.node(static_cast<int>(id)).is_leaf()) continue;
            append_polygon(part.polygons[id], "none");
        }
    }
    out += "</svg>\n";
    return out;
}

/// One entry per node of the partitioned weighted tree, preorder.
inline std::string write_slack_json(const WeightedTree& tree, const SlackPartition& part) {
    detail::internal_check(part.rects.size() == tree.node_count(),
                           "slack partition does not cover the tree");
    std::string out = "{\"epsilon\":";
    out += format_double(part.config.epsilon);
    out += ",\"dim\":";
    out += std::to_string(part.config.dim);
    out += ",\"entries\":[";
    for (std::size_t id = 0; id < tree.node_count(); ++id) {
        if (id) out += ',';
        out += "{\"path\":";
        detail::append_json_string(out, node_path(tree, static_cast<int>(id)));
        out += ",\"origin\":";
        detail::append_double_array(out, part.rects[id].origin);
        out += ",\"sides\":";
        detail::append_double_array(out, part.rects[id].sides);
        out += '}';
    }
    out += "]}\n";
    return out;
}

inline std::string write_report_json(const DistortionReport& r) {
    std::string out = "{\"expansion\":";
    out += format_double(r.expansion);
    out += ",\"contraction\":";
    out += format_double(r.contraction);
    out += ",\"distortion\":";
    out += format_double(r.distortion);
    out += ",\"lower_bound\":";
    out += format_double(r.lower_bound);
    out += ",\"ratio\":";
    out += format_double(r.ratio);
    out += ",\"spread\":";
    out += format_double(r.spread);
    out += ",\"epsilon_used\":";
    out += format_double(r.epsilon_used);
    out += ",\"warning\":";
    out += r.warning ? "true" : "false";
    out += "}\n";
    return out;
}

namespace detail {

inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t");
        return s.substr(a, b - a + 1);
    };
    auto end_cell = [&] {
        row.push_back(trim(std::move(cell)));
        cell.clear();
    };
    auto end_row = [&] {
        end_cell();
        if (row.size() > 1 || !row[0].empty()) rows.push_back(std::move(row));
        row.clear();
    };
    for (const char c : text) {
        if (c == ',') {
            end_cell();
        } else if (c == '\n') {
            end_row();
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (!cell.empty() || !row.empty()) end_row();
    return rows;
}

inline double parse_csv_number(const std::string& s) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw MalformedDocument("not a number: \"" + s + "\"");
    }
    return value;
}

} // namespace detail

/// Header row of point names, then the full symmetric matrix, one row per point.
inline MetricSpace read_metric_csv(std::string_view text) {
    const auto rows = detail::parse_csv(text);
    if (rows.empty()) throw MalformedDocument("distance matrix is empty");
    MetricSpace m;
    m.names = rows[0];
    const std::size_t n = m.names.size();
    if (rows.size() != n + 1) {
        throw MalformedDocument("distance matrix needs one row per named point");
    }
    m.dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i + 1];
        if (row.size() != n) throw MalformedDocument("distance matrix row has wrong length");
        for (std::size_t j = 0; j < n; ++j) m.d(i, j) = detail::parse_csv_number(row[j]);
    }
    validate_metric_shape(m);
    return m;
}

inline std::string write_metric_csv(const MetricSpace& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += ',';
        out += m.names[i];
    }
    out += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) out += ',';
            out += format_double(m.d(i, j));
        }
        out += '\n';
    }
    return out;
}

/// Name column followed by one column per coordinate.
inline std::string write_points_csv(const std::vector<std::string>& names,
                                    const std::vector<std::vector<double>>& points) {
    detail::require(names.size() == points.size(), "one name per point required");
    detail::require(!points.empty(), "no points to write");
    std::string out = "name";
    for (std::size_t k = 0; k < points[0].size(); ++k) {
        out += ",x" + std::to_string(k + 1);
    }
    out += '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        out += names[i];
        for (const double c : points[i]) {
            out += ',';
            out += format_double(c);
        }
        out += '\n';
    }
    return out;
}

} // namespace fatpart
