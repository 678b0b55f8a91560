#include "spectator/config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "spectator/csv.h"
#include "spectator/errors.h"

namespace spectator {

namespace {

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string &message) {
    throw SimError(ErrorKind::Config, message);
}

double parse_real(std::string_view v) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        fail("not a finite number: '" + std::string(v) + "'");
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view v) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        fail("not an integer: '" + std::string(v) + "'");
    }
    return out;
}

Vec3 parse_vec(std::string_view v) {
    double c[3];
    for (int i = 0; i < 3; i++) {
        size_t comma = v.find(',');
        if ((i < 2) != (comma != std::string_view::npos)) {
            fail("expected three comma-separated numbers");
        }
        c[i] = parse_real(trim(v.substr(0, comma)));
        v = i < 2 ? v.substr(comma + 1) : std::string_view{};
    }
    return {c[0], c[1], c[2]};
}

void check(bool ok, const char *message) {
    if (!ok) {
        fail(message);
    }
}

using Setter = std::function<void(ScenarioConfig &, std::string_view)>;
using Getter = std::function<std::string(const ScenarioConfig &)>;

struct Key {
    std::string name;  // without namespace
    Setter set;
    Getter get;
};

std::string vec_text(const Vec3 &v) {
    return format_real(v.x) + ", " + format_real(v.y) + ", " + format_real(v.z);
}

std::vector<Key> general_keys() {
    return {
        {"steps",
         [](ScenarioConfig &c, std::string_view v) {
             c.steps = parse_int<int64_t>(v);
             check(c.steps >= 1, "steps must be >= 1");
         },
         [](const ScenarioConfig &c) { return std::to_string(c.steps); }},
        {"runs",
         [](ScenarioConfig &c, std::string_view v) {
             c.runs = parse_int<int64_t>(v);
             check(c.runs >= 1, "runs must be >= 1");
         },
         [](const ScenarioConfig &c) { return std::to_string(c.runs); }},
        {"seed", [](ScenarioConfig &c, std::string_view v) { c.seed = parse_int<uint64_t>(v); },
         [](const ScenarioConfig &c) { return std::to_string(c.seed); }},
        {"mode",
         [](ScenarioConfig &c, std::string_view v) {
             auto m = parse_mode(v);
             check(m.has_value(), "mode must be 'sampled' or 'crb'");
             c.mode = *m;
         },
         [](const ScenarioConfig &c) { return std::string(mode_name(c.mode)); }},
    };
}

Key m_key() {
    return {"M",
            [](ScenarioConfig &c, std::string_view v) {
                c.M = parse_int<int64_t>(v);
                check(c.M >= 1, "M must be >= 1");
            },
            [](const ScenarioConfig &c) { return std::to_string(c.M); }};
}

std::vector<Key> beam_keys(ScenarioKind kind) {
    const bool delta = kind == ScenarioKind::BeamDelta;
    std::string p = delta ? "delta" : "eps";
    std::vector<Key> keys{
        {p + "0", [](ScenarioConfig &c, std::string_view v) { c.beam.initial = parse_real(v); },
         [](const ScenarioConfig &c) { return format_real(c.beam.initial); }},
        {"d" + p,
         [](ScenarioConfig &c, std::string_view v) {
             c.beam.step = parse_real(v);
             check(c.beam.step >= 0, "step size must be >= 0");
         },
         [](const ScenarioConfig &c) { return format_real(c.beam.step); }},
        {p + "_bar0",
         [delta](ScenarioConfig &c, std::string_view v) {
             c.beam.initial_estimate = parse_real(v);
             if (delta) {
                 check(std::abs(c.beam.initial_estimate) < 1, "|delta_bar0| must be < 1");
             } else {
                 check(c.beam.initial_estimate < 0.99, "eps_bar0 must be < 0.99");
             }
         },
         [](const ScenarioConfig &c) { return format_real(c.beam.initial_estimate); }},
        {"c",
         [](ScenarioConfig &c, std::string_view v) {
             c.beam.c = parse_real(v);
             check(c.beam.c > 1, "c must exceed 1");
         },
         [](const ScenarioConfig &c) { return format_real(c.beam.c); }},
        m_key(),
        {"gates_per_cycle",
         [](ScenarioConfig &c, std::string_view v) {
             c.beam.gates_per_cycle = parse_int<int>(v);
             check(c.beam.gates_per_cycle >= 1, "gates_per_cycle must be >= 1");
         },
         [](const ScenarioConfig &c) { return std::to_string(c.beam.gates_per_cycle); }},
        {"spectator_profile",
         [](ScenarioConfig &c, std::string_view v) {
             if (v == "linear") {
                 c.beam.profile = SpectatorProfile::Linear;
             } else if (v == "exact") {
                 c.beam.profile = SpectatorProfile::ExactGaussian;
             } else {
                 fail("spectator_profile must be 'linear' or 'exact'");
             }
         },
         [](const ScenarioConfig &c) {
             return std::string(c.beam.profile == SpectatorProfile::Linear ? "linear" : "exact");
         }},
    };
    return keys;
}

std::vector<Key> field_keys() {
    auto field_vec = [](Vec3 FieldParams::*member) {
        return Key{"", [member](ScenarioConfig &c, std::string_view v) {
                       Vec3 b = parse_vec(v);
                       check(b.norm() > 0, "spectator field must be nonzero");
                       c.field.*member = b;
                   },
                   [member](const ScenarioConfig &c) { return vec_text(c.field.*member); }};
    };
    Key b1 = field_vec(&FieldParams::b1);
    b1.name = "b1";
    Key b2 = field_vec(&FieldParams::b2);
    b2.name = "b2";
    return {
        {"tau",
         [](ScenarioConfig &c, std::string_view v) {
             c.field.tau = parse_real(v);
             check(c.field.tau > 0, "tau must be > 0");
         },
         [](const ScenarioConfig &c) { return format_real(c.field.tau); }},
        b1,
        b2,
        {"rel_step",
         [](ScenarioConfig &c, std::string_view v) {
             Vec3 r = parse_vec(v);
             check(r.x >= 0 && r.y >= 0 && r.z >= 0, "rel_step components must be >= 0");
             c.field.rel_step = r;
         },
         [](const ScenarioConfig &c) { return vec_text(c.field.rel_step); }},
        {"n_pulses",
         [](ScenarioConfig &c, std::string_view v) {
             c.field.pulses = parse_int<int>(v);
             check(c.field.pulses >= 2 && c.field.pulses % 2 == 0, "n_pulses must be even and >= 2");
         },
         [](const ScenarioConfig &c) { return std::to_string(c.field.pulses); }},
        m_key(),
    };
}

std::vector<Key> scenario_keys(ScenarioKind kind) {
    return is_beam(kind) ? beam_keys(kind) : field_keys();
}

struct Line {
    int number;
    std::string key;
    std::string value;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    while (!text.empty()) {
        size_t nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        number++;
        size_t hash = raw.find('#');
        std::string_view body = trim(raw.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            fail("line " + std::to_string(number) + ": expected 'key = value'");
        }
        std::string_view key = trim(body.substr(0, eq));
        std::string_view value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail("line " + std::to_string(number) + ": empty key or value");
        }
        lines.push_back({number, std::string(key), std::string(value)});
    }
    return lines;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::optional<ScenarioKind> scenario) {
    std::vector<Line> lines = split_lines(text);

    std::optional<ScenarioKind> kind = scenario;
    for (const Line &l : lines) {
        if (l.key != "scenario") {
            continue;
        }
        auto parsed = parse_scenario(l.value);
        if (!parsed) {
            fail("line " + std::to_string(l.number) + ": unknown scenario '" + l.value + "'");
        }
        if (kind && *kind != *parsed) {
            fail("line " + std::to_string(l.number) + ": scenario '" + l.value + "' conflicts with the requested '" +
                 std::string(scenario_name(*kind)) + "'");
        }
        kind = parsed;
    }
    if (!kind) {
        fail("missing key 'scenario'");
    }

    ScenarioConfig cfg = ScenarioConfig::defaults(*kind);
    std::map<std::string, Setter> setters;
    for (Key &k : general_keys()) {
        setters.emplace(k.name, std::move(k.set));
    }
    const std::string ns(scenario_namespace(*kind));
    for (Key &k : scenario_keys(*kind)) {
        setters.emplace(ns + "." + k.name, std::move(k.set));
    }

    std::map<std::string, int> seen;
    for (const Line &l : lines) {
        std::string where = "line " + std::to_string(l.number) + ": ";
        auto [it, fresh] = seen.emplace(l.key, l.number);
        if (!fresh) {
            fail(where + "duplicate key '" + l.key + "' (first set on line " + std::to_string(it->second) + ")");
        }
        if (l.key == "scenario") {
            continue;
        }
        auto setter = setters.find(l.key);
        if (setter == setters.end()) {
            size_t dot = l.key.find('.');
            if (dot != std::string::npos && l.key.substr(0, dot) != ns) {
                fail(where + "key '" + l.key + "' does not belong to scenario '" + std::string(scenario_name(*kind)) +
                     "'");
            }
            fail(where + "unknown key '" + l.key + "'");
        }
        try {
            setter->second(cfg, l.value);
        } catch (const SimError &e) {
            fail(where + l.key + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::string serialize_config(const ScenarioConfig &cfg) {
    std::ostringstream out;
    out << "scenario = " << scenario_name(cfg.kind) << "\n";
    for (const Key &k : general_keys()) {
        out << k.name << " = " << k.get(cfg) << "\n";
    }
    const std::string ns(scenario_namespace(cfg.kind));
    for (const Key &k : scenario_keys(cfg.kind)) {
        out << ns << "." << k.name << " = " << k.get(cfg) << "\n";
    }
    return out.str();
}

}  // namespace spectator
