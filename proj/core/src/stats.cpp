#include "eden/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eden/census.hpp"
#include "eden/errors.hpp"

namespace eden {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void TimeSeries::push(std::int64_t step, double value) {
    if (!t.empty() && step <= t.back())
        throw ConfigError("time series checkpoints must be strictly increasing");
    t.push_back(step);
    v.push_back(value);
}

PowerLawFit fit_power_law(const TimeSeries& s, std::int64_t t_min, std::int64_t t_max) {
    if (t_min >= t_max) throw ConfigError("fit window: t_min must be < t_max");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.t[i] < t_min || s.t[i] > t_max) continue;
        if (s.v[i] <= 0.0)
            throw ConfigError("fit_power_law: nonpositive value at t=" + std::to_string(s.t[i]));
        xs.push_back(std::log(static_cast<double>(s.t[i])));
        ys.push_back(std::log(s.v[i]));
    }
    if (xs.size() < 10)
        throw ConfigError("fit_power_law: need at least 10 checkpoints in the window");

    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ConfigError("fit_power_law: degenerate window");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (slope * xs[i] + intercept);
        ss += r * r;
    }

    PowerLawFit fit;
    fit.exponent = slope;
    fit.coefficient = std::exp(intercept);
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.residual = std::sqrt(ss / n);
    return fit;
}

double NormalizedPersistence::quantile(double q) const {
    if (total_closed == 0) return 0.0;
    const auto target = static_cast<std::int64_t>(q * static_cast<double>(total_closed));
    std::int64_t acc = 0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        acc += counts[b];
        if (acc > target) return (static_cast<double>(b) + 0.5) * bin_width;
    }
    return static_cast<double>(counts.size()) * bin_width;
}

NormalizedPersistence normalized_persistence(const std::vector<PersistenceInterval>& intervals,
                                             int hdim, std::int64_t b_min, std::int64_t b_max,
                                             int d, double bin_width) {
    if (bin_width <= 0) throw ConfigError("normalized_persistence: bin width must be positive");
    if (b_min < 1 || b_min > b_max) throw ConfigError("normalized_persistence: bad birth window");
    NormalizedPersistence h;
    h.bin_width = bin_width;
    const double power = static_cast<double>(d - 1) / static_cast<double>(d);
    for (const PersistenceInterval& iv : intervals) {
        if (iv.hdim != hdim || iv.birth < b_min || iv.birth > b_max) continue;
        if (!iv.closed()) {
            ++h.excluded_open;
            continue;
        }
        const double norm = static_cast<double>(iv.death - iv.birth) /
                            std::pow(static_cast<double>(iv.birth), power);
        const auto bin = static_cast<std::size_t>(norm / bin_width);
        if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
        ++h.counts[bin];
        ++h.total_closed;
    }
    return h;
}

AreaTable area_table_from_volumes(const std::vector<std::int64_t>& volumes) {
    AreaTable table;
    for (std::int64_t v : volumes) {
        if (v < 1) throw ConfigError("hole volume must be >= 1");
        const std::size_t slot = v >= 6 ? 5 : static_cast<std::size_t>(v - 1);
        ++table.counts[slot];
        ++table.total;
    }
    return table;
}

AreaTable hole_area_distribution_birth(const std::vector<HoleRecord>& holes) {
    std::vector<std::int64_t> volumes;
    volumes.reserve(holes.size());
    for (const HoleRecord& r : holes) volumes.push_back(r.volume_at_birth);
    return area_table_from_volumes(volumes);
}

AreaTable hole_area_distribution_at(const std::vector<HoleRecord>& holes, std::int64_t t) {
    std::vector<std::int64_t> volumes;
    for (const HoleRecord& r : holes) {
        if (r.birth > t) continue;
        if (r.death >= 0 && r.death <= t) continue;
        // Latest volume sample at or before t.
        std::int64_t vol = -1;
        for (const auto& [step, v] : r.volume_history) {
            if (step > t) break;
            vol = v;
        }
        if (vol > 0) volumes.push_back(vol);
    }
    return area_table_from_volumes(volumes);
}

std::vector<std::pair<std::int64_t, std::string>> birth_shapes(
    const std::vector<HoleRecord>& holes) {
    std::vector<std::pair<std::int64_t, std::string>> out;
    out.reserve(holes.size());
    for (const HoleRecord& r : holes) out.emplace_back(r.volume_at_birth, r.shape_free);
    return out;
}

std::vector<CellCoord> parse_shape_key(const std::string& key) {
    std::vector<CellCoord> cells;
    std::istringstream ks(key);
    std::string cell_tok;
    while (std::getline(ks, cell_tok, ';')) {
        CellCoord c;
        std::istringstream cs(cell_tok);
        std::string coord_tok;
        while (std::getline(cs, coord_tok, '.')) {
            if (c.d >= kMaxDim) throw ConfigError("shape key has too many coordinates");
            c.x[c.d++] = std::stoi(coord_tok);
        }
        cells.push_back(c);
    }
    if (cells.empty()) throw ConfigError("empty shape key");
    return cells;
}

std::vector<ShapeRow> shape_distribution(
    const std::vector<std::pair<std::int64_t, std::string>>& holes, std::int64_t area) {
    if (area < 1) throw ConfigError("shape_distribution: area must be >= 1");
    std::map<std::string, std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& [volume, key] : holes) {
        if (volume != area || key.empty()) continue;
        ++counts[key];
        ++total;
    }
    std::vector<ShapeRow> rows;
    for (const auto& [key, count] : counts) {
        ShapeRow row;
        row.shape_free = key;
        row.count = count;
        row.frequency = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
        const std::vector<CellCoord> cells = parse_shape_key(key);
        std::vector<CellKey> keys;
        keys.reserve(cells.size());
        for (const CellCoord& c : cells) keys.push_back(pack_cell(c));
        row.fixed_types = fixed_multiplicity(keys, cells[0].d);
        row.freq_per_fixed = row.frequency / static_cast<double>(row.fixed_types);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const ShapeRow& a, const ShapeRow& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.shape_free < b.shape_free;
    });
    return rows;
}

LargestHole largest_hole(const std::vector<HoleRecord>& holes,
                         const std::vector<HoleTracker::LiveHole>& live) {
    LargestHole out;
    for (const HoleRecord& r : holes) {
        if (r.volume_at_birth > out.max_birth_volume) {
            out.max_birth_volume = r.volume_at_birth;
            out.max_birth_id = r.id;
        }
    }
    for (const auto& hole : live) {
        if (hole.volume > out.max_live_volume) {
            out.max_live_volume = hole.volume;
            out.max_live_id = hole.record_id;
        }
    }
    return out;
}

TimeSeries series_column(const std::vector<SeriesRow>& rows, const std::string& column) {
    TimeSeries s;
    s.label = column;
    for (const SeriesRow& r : rows) {
        double v = 0;
        if (column == "P") {
            v = static_cast<double>(r.P);
        } else if (column == "OutP") {
            v = static_cast<double>(r.OutP);
        } else if (column == "InnP") {
            v = static_cast<double>(r.InnP);
        } else if (column == "OutP_frac") {
            v = r.P ? static_cast<double>(r.OutP) / static_cast<double>(r.P) : 0.0;
        } else if (column.rfind("beta_", 0) == 0) {
            const int i = std::stoi(column.substr(5));
            if (!r.has_beta(i)) continue;  // untracked at this checkpoint
            v = static_cast<double>(r.beta[static_cast<std::size_t>(i - 1)]);
        } else {
            throw ConfigError("unknown series column: " + column);
        }
        s.push(r.t, v);
    }
    return s;
}

std::int64_t check_betti_upper_bounds(const std::vector<SeriesRow>& rows, int d) {
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        const SeriesRow& r = rows[idx];
        for (int i = 1; i <= d - 1; ++i) {
            if (!r.has_beta(i)) continue;
            const std::int64_t bound =
                i == d - 1 ? r.P : face_count(d, i) * r.P;
            if (r.beta[static_cast<std::size_t>(i - 1)] > bound)
                return static_cast<std::int64_t>(idx);
        }
    }
    return -1;
}

void write_series_csv(std::ostream& os, int d, const std::vector<SeriesRow>& rows) {
    os << "t,P,OutP,InnP";
    for (int i = 1; i <= d - 1; ++i) os << ",beta_" << i;
    os << "\n";
    for (const SeriesRow& r : rows) {
        os << r.t << "," << r.P << "," << r.OutP << "," << r.InnP;
        for (int i = 1; i <= d - 1; ++i) {
            os << ",";
            if (r.has_beta(i)) os << r.beta[static_cast<std::size_t>(i - 1)];
        }
        os << "\n";
    }
}

void write_series_csv_file(const std::string& path, int d, const std::vector<SeriesRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_series_csv(os, d, rows);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<SeriesRow> read_series_csv_file(const std::string& path, int& d_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw ParseError(path, 1, "missing header");
    int cols = 1;
    for (char ch : line) cols += ch == ',';
    d_out = cols - 4 + 1;
    std::vector<SeriesRow> rows;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        SeriesRow r;
        std::istringstream ls(line);
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ','))
                throw ParseError(path, lineno, "short series row");
            return field;
        };
        try {
            r.t = std::stoll(next());
            r.P = std::stoll(next());
            r.OutP = std::stoll(next());
            r.InnP = std::stoll(next());
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "bad series row");
        }
        for (int i = 1; i <= d_out - 1; ++i) {
            if (!std::getline(ls, field, ',')) field.clear();
            if (!field.empty()) r.set_beta(i, std::stoll(field));
        }
        rows.push_back(r);
    }
    return rows;
}

void write_fits_csv(std::ostream& os,
                    const std::vector<std::pair<std::string, PowerLawFit>>& fits) {
    os << "series,exponent,coefficient,tmin,tmax,residual\n";
    for (const auto& [name, fit] : fits) {
        os << name << "," << format_double(fit.exponent) << "," << format_double(fit.coefficient)
           << "," << fit.t_min << "," << fit.t_max << "," << format_double(fit.residual) << "\n";
    }
}

void write_fits_csv_file(const std::string& path,
                         const std::vector<std::pair<std::string, PowerLawFit>>& fits) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_fits_csv(os, fits);
    if (!os) throw IoError("write failed: " + path);
}

void write_areas_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, AreaTable>>& tables) {
    os << "mode,area,count,frequency\n";
    for (const auto& [mode, table] : tables) {
        for (int slot = 0; slot < 6; ++slot) {
            os << mode << "," << (slot < 5 ? std::to_string(slot + 1) : std::string("6+")) << ","
               << table.counts[static_cast<std::size_t>(slot)] << ","
               << format_double(table.frequency(slot)) << "\n";
        }
    }
}

void write_areas_csv_file(const std::string& path,
                          const std::vector<std::pair<std::string, AreaTable>>& tables) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_areas_csv(os, tables);
    if (!os) throw IoError("write failed: " + path);
}

void write_shapes_csv(std::ostream& os, const std::vector<ShapeSection>& sections) {
    os << "mode,area,shape_free,count,frequency,fixed_types,freq_per_fixed\n";
    for (const ShapeSection& sec : sections) {
        for (const ShapeRow& row : sec.rows) {
            os << sec.mode << "," << sec.area << "," << row.shape_free << "," << row.count << ","
               << format_double(row.frequency) << "," << row.fixed_types << ","
               << format_double(row.freq_per_fixed) << "\n";
        }
    }
}

void write_shapes_csv_file(const std::string& path, const std::vector<ShapeSection>& sections) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_shapes_csv(os, sections);
    if (!os) throw IoError("write failed: " + path);
}

void write_normpers_csv(std::ostream& os,
                        const std::vector<std::pair<int, NormalizedPersistence>>& hists) {
    os << "hdim,bin_lo,bin_hi,count,excluded_open\n";
    for (const auto& [hdim, h] : hists) {
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            os << hdim << "," << format_double(static_cast<double>(b) * h.bin_width) << ","
               << format_double(static_cast<double>(b + 1) * h.bin_width) << "," << h.counts[b]
               << "," << h.excluded_open << "\n";
        }
    }
}

void write_normpers_csv_file(const std::string& path,
                             const std::vector<std::pair<int, NormalizedPersistence>>& hists) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_normpers_csv(os, hists);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace eden
