// SPDX-License-Identifier: Apache-2.0
//
// dualpol: dual-structured precoding for dual-polarized massive MIMO downlinks
// Copyright (C) 2025 The dualpol authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dualpol/config.hpp"
#include "dualpol/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace dualpol
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return "";
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
            return s;
        }

        // strtod over the whole token or nothing
        std::optional<double> plain(const std::string &t)
        {
            if (t.empty())
                return std::nullopt;
            char *end = nullptr;
            const double v = std::strtod(t.c_str(), &end);
            if (end != t.c_str() + t.size())
                return std::nullopt;
            return v;
        }

        std::string fmt(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        template <class T, class F>
        std::string join(const std::vector<T> &v, F &&f)
        {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + f(v[i]);
            return s + "]";
        }
    }

    double parse_number(const std::string &token, const std::string &field)
    {
        std::string t = lower(trim(token));
        const auto bad = [&] { return config_error(field + ": cannot read '" + token + "' as a number"); };
        double factor = 1.0;
        if (t.size() > 3 && t.ends_with("deg"))
        {
            factor = std::numbers::pi / 180.0;
            t = trim(t.substr(0, t.size() - 3));
        }
        if (auto v = plain(t))
            return factor * *v;

        // [a]pi[/b] and a/b forms
        std::string num = t, den;
        if (const auto slash = t.find('/'); slash != std::string::npos)
        {
            num = trim(t.substr(0, slash));
            den = trim(t.substr(slash + 1));
        }
        double value = 1.0;
        if (num.ends_with("pi"))
        {
            const std::string head = trim(num.substr(0, num.size() - 2));
            if (!head.empty())
            {
                const std::string h = head.back() == '*' ? head.substr(0, head.size() - 1) : head;
                if (h == "-" || h == "+")
                    value = h == "-" ? -1.0 : 1.0;
                else if (const auto v = plain(h))
                    value = *v;
                else
                    throw bad();
            }
            value *= std::numbers::pi;
        }
        else if (auto v = plain(num))
            value = *v;
        else
            throw bad();
        if (!den.empty())
        {
            const auto d = plain(den);
            if (!d || *d == 0.0)
                throw bad();
            value /= *d;
        }
        return factor * value;
    }

    KeyValueFile KeyValueFile::parse(std::istream &in, const std::string &source)
    {
        KeyValueFile kv;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            const std::string where = source + ":" + std::to_string(lineno);
            if (eq == std::string::npos)
                throw config_error(where + ": expected 'key = value'");
            const std::string key = lower(trim(line.substr(0, eq)));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error(where + ": empty key");
            if (kv.entries_.count(key))
                throw config_error(where + ": duplicate key '" + key + "'");
            if (!val.empty() && val.front() == '[')
            {
                if (val.back() != ']')
                    throw config_error(where + ": unterminated list for '" + key + "'");
                val = val.substr(1, val.size() - 2);
            }

            std::vector<std::string> items;
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (item.empty())
                    continue;
                // start:step:stop
                const auto c1 = item.find(':');
                if (c1 != std::string::npos)
                {
                    const auto c2 = item.find(':', c1 + 1);
                    if (c2 == std::string::npos)
                        throw config_error(where + ": range for '" + key + "' needs start:step:stop");
                    const double a = parse_number(item.substr(0, c1), key);
                    const double st = parse_number(item.substr(c1 + 1, c2 - c1 - 1), key);
                    const double b = parse_number(item.substr(c2 + 1), key);
                    if (!(st > 0.0) || b < a)
                        throw config_error(where + ": range for '" + key + "' must have step > 0 and stop >= start");
                    const long n = std::lround(std::floor((b - a) / st + 1e-9));
                    if (n > 100000)
                        throw config_error(where + ": range for '" + key + "' is too long");
                    for (long i = 0; i <= n; ++i)
                        items.push_back(fmt(a + double(i) * st));
                }
                else
                    items.push_back(item);
            }
            kv.entries_[key] = std::move(items);
        }
        return kv;
    }

    KeyValueFile KeyValueFile::load(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw config_error("config: cannot open '" + path + "'");
        return parse(f, path);
    }

    const std::vector<std::string> &KeyValueFile::values(const std::string &key) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw config_error(key + ": missing");
        return it->second;
    }

    std::vector<std::string> KeyValueFile::keys() const
    {
        std::vector<std::string> k;
        for (const auto &e : entries_)
            k.push_back(e.first);
        return k;
    }

    std::string KeyValueFile::text(const std::string &key) const
    {
        const auto &v = values(key);
        if (v.size() != 1)
            throw config_error(key + ": expected a single value");
        return v.front();
    }

    double KeyValueFile::number(const std::string &key) const { return parse_number(text(key), key); }

    arma::uword KeyValueFile::count(const std::string &key) const
    {
        const double v = number(key);
        if (v < 0.0 || v != std::floor(v) || v > 1e15)
            throw config_error(key + ": expected a non-negative integer");
        return arma::uword(v);
    }

    bool KeyValueFile::flag(const std::string &key) const
    {
        const std::string v = lower(text(key));
        if (v == "true" || v == "yes" || v == "1" || v == "on")
            return true;
        if (v == "false" || v == "no" || v == "0" || v == "off")
            return false;
        throw config_error(key + ": expected true or false");
    }

    std::vector<double> KeyValueFile::numbers(const std::string &key) const
    {
        std::vector<double> out;
        for (const auto &t : values(key))
            out.push_back(parse_number(t, key));
        return out;
    }

    ScenarioConfig::ScenarioConfig() : spread(std::numbers::pi / 12.0) {}

    std::vector<double> ScenarioConfig::group_azimuths() const
    {
        if (!azimuths.empty())
            return azimuths;
        std::vector<double> a;
        for (arma::uword g = 0; g < groups; ++g)
            a.push_back(-std::numbers::pi / 4.0 + std::numbers::pi / 6.0 * double(g));
        return a;
    }

    const std::vector<std::string> &known_schemes()
    {
        static const std::vector<std::string> s{"BD", "BDS", "SWITCH", "SWITCH_RAW",
                                                "ASYM_BD", "ASYM_BDS", "APPROX_BD", "APPROX_BDS"};
        return s;
    }

    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &field, const std::string &msg) { throw config_error(field + ": " + msg); };
        const double half_pi = std::numbers::pi / 2.0;

        if (scenario_id.empty() || scenario_id.find_first_of(",\"\n") != std::string::npos)
            fail("scenario_id", "must be non-empty without commas or quotes");
        if (users_per_group == 0 || users_per_group % 2)
            fail("users_per_group", "must be even and positive");
        if (groups == 0)
            fail("groups", "must be positive");
        if (!azimuths.empty() && azimuths.size() != groups)
            fail("azimuths", "needs one entry per group");
        if (!(spread >= 0.0 && spread < half_pi))
            fail("spread", "must lie in [0, pi/2)");
        if (!(spacing > 0.0))
            fail("spacing", "must be positive");
        if (three_d)
        {
            if (elev_elements == 0 || azim_elements == 0)
                fail("elev_elements", "planar array dimensions must be positive");
            if (distances.empty())
                fail("distances", "at least one region is required");
            if (!(height > 0.0))
                fail("height", "must be positive");
            if (elevation_rank && *elevation_rank == 0)
                fail("elevation_rank", "must be positive");
        }
        else
        {
            if (antennas == 0 || (dual_pol && antennas % 2))
                fail("antennas", dual_pol ? "must be even and positive" : "must be positive");
        }
        if (!dual_pol && three_d)
            fail("dual_pol", "the planar array is dual-polarized");

        if (snr_db.empty())
            fail("snr_db", "at least one value is required");
        for (double s : snr_db)
            if (!std::isfinite(s) || s < -100.0 || s > 100.0)
                fail("snr_db", "values must lie in [-100, 100]");
        if (!chi_range && chi.empty())
            fail("chi", "at least one value is required");
        for (double c : chi)
            if (!(c >= 0.0 && c <= 1.0))
                fail("chi", "values must lie in [0,1]");
        if (chi_range && !(chi_range->first >= 0.0 && chi_range->first <= chi_range->second && chi_range->second <= 1.0))
            fail("chi_range", "must be [lo, hi] with 0 <= lo <= hi <= 1");
        if (tau_range && !(tau_range->first >= 0.0 && tau_range->first <= tau_range->second && tau_range->second <= 1.0))
            fail("tau_range", "must be [lo, hi] with 0 <= lo <= hi <= 1");
        if (tau_range && !n_bits.empty())
            fail("tau_range", "cannot be combined with n_bits");
        if (n_bits.empty() && !tau_range && tau_sq.empty())
            fail("tau_sq", "at least one value is required");
        for (double t : tau_sq)
            if (!(t >= 0.0) || !std::isfinite(t))
                fail("tau_sq", "values must be non-negative");
        for (arma::uword b : n_bits)
            if (b == 0)
                fail("n_bits", "values must be positive");
        if (!(theta_max >= 0.0 && theta_max <= half_pi))
            fail("theta_max", "must lie in [0, pi/2]");

        if (!grid)
        {
            int varying = 0;
            varying += snr_db.size() > 1;
            varying += !chi_range && chi.size() > 1;
            varying += n_bits.empty() && !tau_range && tau_sq.size() > 1;
            varying += n_bits.size() > 1;
            if (varying > 1)
                fail("grid", "more than one sweep axis varies; set grid = true");
        }

        bool any_mc = false;
        std::set<std::string> seen;
        for (const auto &s : schemes)
        {
            if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end())
                fail("schemes", "unknown scheme '" + s + "'");
            if (!seen.insert(s).second)
                fail("schemes", "duplicate scheme '" + s + "'");
            const bool asym = s.starts_with("ASYM") || s.starts_with("APPROX");
            any_mc = any_mc || !asym;
            if (!dual_pol && s != "BD")
                fail("schemes", s + " needs a dual-polarized array");
            if (asym && (chi_range || tau_range))
                fail("schemes", s + " needs fixed chi and tau values");
            if (asym && theta_max > 0.0)
                fail("schemes", s + " is not defined under polarization mismatch");
        }
        if (any_mc && n_trials == 0)
            fail("n_trials", "must be positive");
    }

    ScenarioConfig config_from_keys(const KeyValueFile &kv)
    {
        static const std::set<std::string> allowed{
            "scenario_id", "geometry", "antennas", "dual_pol", "spacing", "groups", "azimuths", "spread",
            "users_per_group", "bbar", "r", "bds_reg", "elev_elements", "azim_elements", "height", "distances",
            "elevation_rank", "snr_db", "chi", "tau_sq", "n_bits", "chi_range", "tau_range", "tau_rule", "grid",
            "theta_max", "switch_chi_eff", "schemes", "n_trials", "seed", "threads", "out"};
        for (const auto &k : kv.keys())
            if (!allowed.count(k))
                throw config_error(k + ": unknown key");

        ScenarioConfig c;
        auto pair_of = [&](const std::string &k)
        {
            const auto v = kv.numbers(k);
            if (v.size() != 2)
                throw config_error(k + ": expected [lo, hi]");
            return std::make_pair(v[0], v[1]);
        };
        auto counts = [&](const std::string &k)
        {
            std::vector<arma::uword> out;
            for (double v : kv.numbers(k))
            {
                if (v < 0.0 || v != std::floor(v))
                    throw config_error(k + ": expected non-negative integers");
                out.push_back(arma::uword(v));
            }
            return out;
        };

        if (kv.has("scenario_id"))
            c.scenario_id = kv.text("scenario_id");
        if (kv.has("geometry"))
        {
            const std::string g = lower(kv.text("geometry"));
            if (g != "2d" && g != "3d")
                throw config_error("geometry: expected 2d or 3d");
            c.three_d = g == "3d";
        }
        if (kv.has("antennas"))
            c.antennas = kv.count("antennas");
        if (kv.has("dual_pol"))
            c.dual_pol = kv.flag("dual_pol");
        if (kv.has("spacing"))
            c.spacing = kv.number("spacing");
        if (kv.has("groups"))
            c.groups = kv.count("groups");
        if (kv.has("azimuths"))
            c.azimuths = kv.numbers("azimuths");
        if (kv.has("spread"))
            c.spread = kv.number("spread");
        if (kv.has("users_per_group"))
            c.users_per_group = kv.count("users_per_group");
        if (kv.has("bbar"))
            c.bbar = kv.count("bbar");
        if (kv.has("r"))
            c.r = kv.count("r");
        if (kv.has("bds_reg"))
        {
            const std::string v = lower(kv.text("bds_reg"));
            if (v != "matched" && v != "printed")
                throw config_error("bds_reg: expected matched or printed");
            c.bds_reg = v == "matched" ? BdsRegularizer::matched : BdsRegularizer::printed;
        }
        if (kv.has("elev_elements"))
            c.elev_elements = kv.count("elev_elements");
        if (kv.has("azim_elements"))
            c.azim_elements = kv.count("azim_elements");
        if (kv.has("height"))
            c.height = kv.number("height");
        if (kv.has("distances"))
            c.distances = kv.numbers("distances");
        if (kv.has("elevation_rank"))
            c.elevation_rank = kv.count("elevation_rank");
        if (kv.has("snr_db"))
            c.snr_db = kv.numbers("snr_db");
        if (kv.has("chi"))
            c.chi = kv.numbers("chi");
        if (kv.has("tau_sq"))
            c.tau_sq = kv.numbers("tau_sq");
        if (kv.has("n_bits"))
            c.n_bits = counts("n_bits");
        if (kv.has("chi_range"))
            c.chi_range = pair_of("chi_range");
        if (kv.has("tau_range"))
            c.tau_range = pair_of("tau_range");
        if (kv.has("tau_rule"))
        {
            const std::string v = lower(kv.text("tau_rule"));
            if (v != "same" && v != "squared")
                throw config_error("tau_rule: expected same or squared");
            c.tau_rule = v == "same" ? TauRule::same : TauRule::squared;
        }
        if (kv.has("grid"))
            c.grid = kv.flag("grid");
        if (kv.has("theta_max"))
            c.theta_max = kv.number("theta_max");
        if (kv.has("switch_chi_eff"))
            c.switch_chi_eff = kv.flag("switch_chi_eff");
        if (kv.has("schemes"))
        {
            c.schemes.clear();
            for (const auto &s : kv.values("schemes"))
            {
                std::string u = s;
                std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return char(std::toupper(ch)); });
                c.schemes.push_back(u);
            }
        }
        if (kv.has("n_trials"))
            c.n_trials = kv.count("n_trials");
        if (kv.has("seed"))
            c.seed = kv.count("seed");
        if (kv.has("threads"))
            c.threads = unsigned(kv.count("threads"));
        if (kv.has("out"))
            c.out = kv.text("out");
        c.validate();
        return c;
    }

    ScenarioConfig load_config(const std::string &path) { return config_from_keys(KeyValueFile::load(path)); }

    std::string to_config_text(const ScenarioConfig &c)
    {
        std::ostringstream o;
        auto num = [](double v) { return fmt(v); };
        auto cnt = [](arma::uword v) { return std::to_string(v); };
        auto str = [](const std::string &v) { return v; };
        o << "scenario_id = " << c.scenario_id << "\n";
        o << "geometry = " << (c.three_d ? "3d" : "2d") << "\n";
        if (c.three_d)
        {
            o << "elev_elements = " << c.elev_elements << "\n";
            o << "azim_elements = " << c.azim_elements << "\n";
            o << "height = " << num(c.height) << "\n";
            o << "distances = " << join(c.distances, num) << "\n";
            if (c.elevation_rank)
                o << "elevation_rank = " << *c.elevation_rank << "\n";
        }
        else
        {
            o << "antennas = " << c.antennas << "\n";
            o << "dual_pol = " << (c.dual_pol ? "true" : "false") << "\n";
        }
        o << "spacing = " << num(c.spacing) << "\n";
        o << "groups = " << c.groups << "\n";
        if (!c.azimuths.empty())
            o << "azimuths = " << join(c.azimuths, num) << "\n";
        o << "spread = " << num(c.spread) << "\n";
        o << "users_per_group = " << c.users_per_group << "\n";
        if (c.bbar)
            o << "bbar = " << *c.bbar << "\n";
        if (c.r)
            o << "r = " << *c.r << "\n";
        o << "bds_reg = " << (c.bds_reg == BdsRegularizer::matched ? "matched" : "printed") << "\n";
        o << "snr_db = " << join(c.snr_db, num) << "\n";
        if (c.chi_range)
            o << "chi_range = [" << num(c.chi_range->first) << ", " << num(c.chi_range->second) << "]\n";
        else
            o << "chi = " << join(c.chi, num) << "\n";
        if (!c.n_bits.empty())
            o << "n_bits = " << join(c.n_bits, cnt) << "\n";
        else if (c.tau_range)
            o << "tau_range = [" << num(c.tau_range->first) << ", " << num(c.tau_range->second) << "]\n";
        else
            o << "tau_sq = " << join(c.tau_sq, num) << "\n";
        o << "tau_rule = " << (c.tau_rule == TauRule::same ? "same" : "squared") << "\n";
        o << "grid = " << (c.grid ? "true" : "false") << "\n";
        o << "theta_max = " << num(c.theta_max) << "\n";
        o << "switch_chi_eff = " << (c.switch_chi_eff ? "true" : "false") << "\n";
        o << "schemes = " << join(c.schemes, str) << "\n";
        o << "n_trials = " << c.n_trials << "\n";
        o << "seed = " << c.seed << "\n";
        if (c.threads)
            o << "threads = " << c.threads << "\n";
        if (!c.out.empty())
            o << "out = " << c.out << "\n";
        return o.str();
    }
}
