#include "smr/stack_io.hpp"

#include "smr/errors.hpp"
#include "smr/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace smr {

namespace {

struct Token {
    std::string text;
    int column = 0; // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#')
            break; // comment to end of line
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

double parse_quantity_at(const std::string& text, int line, int column) {
    try {
        return units::parse_quantity(text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line, column);
    }
}

// "key=value" -> {key, value}; returns nullopt when no '=' is present.
std::optional<std::pair<std::string, std::string>> split_kv(const std::string& token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
        return std::nullopt;
    return std::make_pair(token.substr(0, eq), token.substr(eq + 1));
}

Material parse_material_line(const std::vector<Token>& tokens, int line_no) {
    Material m;
    m.name = tokens[0].text;
    bool have_density = false, have_velocity = false, have_q = false;
    std::optional<double> e33, eps33;

    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto kv = split_kv(tokens[i].text);
        if (!kv)
            throw ParseError("expected key=value, got '" + tokens[i].text + "'",
                             line_no, tokens[i].column);
        const double value = parse_quantity_at(kv->second, line_no, tokens[i].column);
        if (kv->first == "density") {
            m.density = value;
            have_density = true;
        } else if (kv->first == "velocity") {
            m.velocity = value;
            have_velocity = true;
        } else if (kv->first == "q") {
            m.q_mech = value;
            have_q = true;
        } else if (kv->first == "e33") {
            e33 = value;
        } else if (kv->first == "eps33") {
            eps33 = value;
        } else {
            throw ParseError("unknown material key '" + kv->first + "'",
                             line_no, tokens[i].column);
        }
    }

    if (!have_density || !have_velocity || !have_q)
        throw ParseError("material '" + m.name + "' needs density, velocity and q",
                         line_no, tokens[0].column);
    if (e33.has_value() != eps33.has_value())
        throw ParseError("material '" + m.name + "': e33 and eps33 must both be given",
                         line_no, tokens[0].column);
    if (e33)
        m.piezo = PiezoConstants{*e33, *eps33};

    try {
        check_material(m);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, tokens[0].column);
    }
    return m;
}

const Material& lookup_material(const std::vector<Material>& materials,
                                const std::string& name, int line, int column) {
    const auto it = std::find_if(materials.begin(), materials.end(),
                                 [&](const Material& m) { return m.name == name; });
    if (it == materials.end())
        throw ParseError("unknown material reference '" + name + "'", line, column);
    return *it;
}

std::string format_si(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace

StackDocument parse_stack_document(const std::string& text,
                                   std::span<const std::string> extra_sections) {
    StackDocument doc;
    enum class Section { none, materials, stack, geometry, extra };
    Section section = Section::none;
    std::string extra_name;

    struct PendingLayer {
        std::string material;
        double thickness;
        bool piezo;
        int line;
        int column;
    };
    std::vector<PendingLayer> layers;
    std::vector<PendingLayer> repeat_block;
    int repeat_count = 0;
    bool in_repeat = false;
    int repeat_line = 0;

    bool saw_materials = false, saw_stack = false, saw_geometry = false;
    std::optional<double> area;
    std::optional<std::string> substrate_name;
    int substrate_line = 0, substrate_col = 0;
    TopBoundary top_boundary = TopBoundary::free_surface;
    std::optional<std::string> top_load_name;
    int top_line = 0, top_col = 0;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto tokens = tokenize(raw);
        if (tokens.empty())
            continue;

        // Section header
        if (tokens[0].text.front() == '[') {
            if (tokens.size() != 1 || tokens[0].text.back() != ']')
                throw ParseError("malformed section header", line_no, tokens[0].column);
            if (in_repeat)
                throw ParseError("repeat block not closed before new section",
                                 line_no, tokens[0].column);
            const std::string name = tokens[0].text.substr(1, tokens[0].text.size() - 2);
            if (name == "materials") {
                section = Section::materials;
                saw_materials = true;
            } else if (name == "stack") {
                section = Section::stack;
                saw_stack = true;
            } else if (name == "geometry") {
                section = Section::geometry;
                saw_geometry = true;
            } else if (std::find(extra_sections.begin(), extra_sections.end(), name) !=
                       extra_sections.end()) {
                section = Section::extra;
                extra_name = name;
                doc.extra_sections[extra_name]; // create even if empty
            } else {
                throw ParseError("unknown section [" + name + "]", line_no, tokens[0].column);
            }
            continue;
        }

        switch (section) {
        case Section::none:
            throw ParseError("content before any section header", line_no, tokens[0].column);

        case Section::extra: {
            // Store comment-stripped text so extension dialects see the same
            // comment rules as the core sections.
            std::string cleaned = raw.substr(0, raw.find('#'));
            doc.extra_sections[extra_name].push_back({line_no, std::move(cleaned)});
            break;
        }

        case Section::materials: {
            const Material m = parse_material_line(tokens, line_no);
            const bool duplicate = std::any_of(doc.materials.begin(), doc.materials.end(),
                                               [&](const Material& x) { return x.name == m.name; });
            if (duplicate)
                throw ParseError("material '" + m.name + "' declared twice",
                                 line_no, tokens[0].column);
            doc.materials.push_back(m);
            break;
        }

        case Section::stack: {
            if (tokens[0].text == "repeat") {
                if (in_repeat)
                    throw ParseError("nested repeat blocks are not supported",
                                     line_no, tokens[0].column);
                if (tokens.size() != 2)
                    throw ParseError("repeat needs a count", line_no, tokens[0].column);
                int n = 0;
                const auto& t = tokens[1].text;
                const auto res = std::from_chars(t.data(), t.data() + t.size(), n);
                if (res.ec != std::errc() || res.ptr != t.data() + t.size() || n < 1)
                    throw ParseError("repeat count must be a positive integer",
                                     line_no, tokens[1].column);
                in_repeat = true;
                repeat_count = n;
                repeat_line = line_no;
                repeat_block.clear();
                break;
            }
            if (tokens[0].text == "end") {
                if (!in_repeat)
                    throw ParseError("'end' without repeat", line_no, tokens[0].column);
                if (repeat_block.empty())
                    throw ParseError("empty repeat block", repeat_line, 1);
                for (int r = 0; r < repeat_count; ++r)
                    layers.insert(layers.end(), repeat_block.begin(), repeat_block.end());
                in_repeat = false;
                break;
            }
            if (tokens.size() < 2 || tokens.size() > 3)
                throw ParseError("layer line must be '<material> <thickness> [piezo]'",
                                 line_no, tokens[0].column);
            PendingLayer layer;
            layer.material = tokens[0].text;
            layer.thickness = parse_quantity_at(tokens[1].text, line_no, tokens[1].column);
            layer.piezo = false;
            layer.line = line_no;
            layer.column = tokens[0].column;
            if (!(layer.thickness > 0.0) || !std::isfinite(layer.thickness))
                throw ParseError("layer thickness must be > 0", line_no, tokens[1].column);
            if (tokens.size() == 3) {
                if (tokens[2].text != "piezo")
                    throw ParseError("unexpected token '" + tokens[2].text + "'",
                                     line_no, tokens[2].column);
                if (in_repeat)
                    throw ParseError("piezo layer cannot be inside a repeat block",
                                     line_no, tokens[2].column);
                layer.piezo = true;
            }
            (in_repeat ? repeat_block : layers).push_back(layer);
            break;
        }

        case Section::geometry: {
            // key = value (value may span several tokens: "loaded Pt")
            std::string joined;
            for (const auto& t : tokens) {
                if (!joined.empty())
                    joined += ' ';
                joined += t.text;
            }
            const auto eq = joined.find('=');
            if (eq == std::string::npos)
                throw ParseError("geometry line must be 'key = value'",
                                 line_no, tokens[0].column);
            auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(' ');
                const auto b = s.find_last_not_of(' ');
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = strip(joined.substr(0, eq));
            const std::string value = strip(joined.substr(eq + 1));
            if (value.empty())
                throw ParseError("missing value for '" + key + "'", line_no, tokens[0].column);
            if (key == "area") {
                area = parse_quantity_at(value, line_no, tokens[0].column);
            } else if (key == "substrate") {
                substrate_name = value;
                substrate_line = line_no;
                substrate_col = tokens[0].column;
            } else if (key == "top") {
                top_line = line_no;
                top_col = tokens[0].column;
                if (value == "free") {
                    top_boundary = TopBoundary::free_surface;
                } else if (value.rfind("loaded", 0) == 0) {
                    top_boundary = TopBoundary::loaded;
                    top_load_name = strip(value.substr(6));
                    if (top_load_name->empty())
                        throw ParseError("'top = loaded' needs a material name",
                                         line_no, tokens[0].column);
                } else {
                    throw ParseError("top must be 'free' or 'loaded <material>'",
                                     line_no, tokens[0].column);
                }
            } else {
                throw ParseError("unknown geometry key '" + key + "'",
                                 line_no, tokens[0].column);
            }
            break;
        }
        }
    }

    if (in_repeat)
        throw ParseError("repeat block not closed by 'end'", repeat_line, 1);
    if (!saw_materials)
        throw ParseError("missing [materials] section", line_no > 0 ? line_no : 1);
    if (!saw_stack)
        throw ParseError("missing [stack] section", line_no > 0 ? line_no : 1);
    if (!saw_geometry)
        throw ParseError("missing [geometry] section", line_no > 0 ? line_no : 1);
    if (layers.empty())
        throw ParseError("stack has no layers", line_no);
    if (!area)
        throw ParseError("geometry is missing 'area'", line_no);
    if (!substrate_name)
        throw ParseError("geometry is missing 'substrate'", line_no);

    Stack& s = doc.stack;
    s.area = *area;
    s.substrate = lookup_material(doc.materials, *substrate_name,
                                  substrate_line, substrate_col);
    s.top_boundary = top_boundary;
    if (top_boundary == TopBoundary::loaded)
        s.top_load = lookup_material(doc.materials, *top_load_name, top_line, top_col);

    std::optional<std::size_t> piezo_index;
    for (const auto& p : layers) {
        const Material& m = lookup_material(doc.materials, p.material, p.line, p.column);
        if (p.piezo) {
            if (piezo_index)
                throw ParseError("duplicate piezo designation (first at layer " +
                                     std::to_string(*piezo_index) + ")",
                                 p.line, p.column);
            piezo_index = s.layers.size();
            if (!m.is_piezo())
                throw ParseError("piezo layer '" + m.name + "' lacks e33/eps33",
                                 p.line, p.column);
        }
        s.layers.push_back({m, p.thickness});
    }
    if (!piezo_index)
        throw ParseError("no layer is designated 'piezo'", line_no);
    s.piezo_index = *piezo_index;

    require_valid(s);
    return doc;
}

Stack parse_stack_file(const std::string& text) {
    return parse_stack_document(text).stack;
}

std::map<std::string, Material> parse_materials_file(const std::string& text) {
    std::map<std::string, Material> out;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    bool in_materials = false;
    bool saw_materials = false;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto tokens = tokenize(raw);
        if (tokens.empty())
            continue;
        if (tokens[0].text.front() == '[') {
            in_materials = (tokens[0].text == "[materials]");
            saw_materials = saw_materials || in_materials;
            continue;
        }
        if (!in_materials)
            continue;
        const Material m = parse_material_line(tokens, line_no);
        if (!out.emplace(m.name, m).second)
            throw ParseError("material '" + m.name + "' declared twice", line_no,
                             tokens[0].column);
    }
    if (!saw_materials)
        throw ParseError("missing [materials] section", 1);
    return out;
}

std::string material_line(const Material& m) {
    std::string s = m.name + "  density=" + format_si(m.density) +
                    "  velocity=" + format_si(m.velocity) +
                    "  q=" + format_si(m.q_mech);
    if (m.piezo)
        s += "  e33=" + format_si(m.piezo->e33) + "  eps33=" + format_si(m.piezo->eps33);
    return s;
}

std::string serialize_stack_file(const Stack& s) {
    // Collect distinct materials; identical names must mean identical constants.
    std::vector<Material> materials;
    auto add = [&](const Material& m) {
        for (const auto& seen : materials) {
            if (seen.name != m.name)
                continue;
            const bool same = seen.density == m.density && seen.velocity == m.velocity &&
                              seen.q_mech == m.q_mech &&
                              seen.piezo.has_value() == m.piezo.has_value() &&
                              (!seen.piezo || (seen.piezo->e33 == m.piezo->e33 &&
                                               seen.piezo->eps33 == m.piezo->eps33));
            if (!same)
                throw std::invalid_argument("two distinct materials share the name '" +
                                            m.name + "'");
            return;
        }
        materials.push_back(m);
    };
    for (const auto& layer : s.layers)
        add(layer.material);
    add(s.substrate);
    if (s.top_load)
        add(*s.top_load);

    std::string out = "[materials]\n";
    for (const auto& m : materials)
        out += material_line(m) + "\n";

    out += "\n[stack]\n";
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        out += s.layers[i].material.name + "  " + format_si(s.layers[i].thickness);
        if (i == s.piezo_index)
            out += "  piezo";
        out += "\n";
    }

    out += "\n[geometry]\n";
    out += "area = " + format_si(s.area) + "\n";
    out += "substrate = " + s.substrate.name + "\n";
    if (s.top_boundary == TopBoundary::loaded)
        out += "top = loaded " + s.top_load->name + "\n";
    else
        out += "top = free\n";
    return out;
}

} // namespace smr
