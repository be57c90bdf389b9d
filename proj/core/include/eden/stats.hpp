#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "eden/holetrack.hpp"
#include "eden/homology.hpp"

namespace eden {

struct TimeSeries {
    std::string label;
    std::vector<std::int64_t> t;  // strictly increasing checkpoints
    std::vector<double> v;

    void push(std::int64_t step, double value);
    std::size_t size() const { return t.size(); }
};

struct PowerLawFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    std::int64_t t_min = 0;
    std::int64_t t_max = 0;
    double residual = 0.0;  // RMS residual in log-log space
};

/// Ordinary least squares in log-log space over checkpoints inside
/// [t_min, t_max].  Requires >= 10 checkpoints in the window, all values
/// positive.
PowerLawFit fit_power_law(const TimeSeries& s, std::int64_t t_min, std::int64_t t_max);

struct NormalizedPersistence {
    double bin_width = 0.25;
    std::vector<std::int64_t> counts;  // bin b covers [b*w, (b+1)*w)
    std::int64_t total_closed = 0;
    std::int64_t excluded_open = 0;  // open intervals born in the window

    double frequency(std::size_t bin) const {
        return total_closed ? static_cast<double>(counts[bin]) / static_cast<double>(total_closed)
                            : 0.0;
    }
    double quantile(double q) const;  // of the binned distribution
};

/// Histogram of (death - birth) / birth^{(d-1)/d} over closed intervals of
/// dimension hdim with birth in [b_min, b_max]; open intervals in the
/// window are excluded and counted.
NormalizedPersistence normalized_persistence(const std::vector<PersistenceInterval>& intervals,
                                             int hdim, std::int64_t b_min, std::int64_t b_max,
                                             int d, double bin_width = 0.25);

/// Frequencies of hole volumes 1..5 with >= 6 aggregated.
struct AreaTable {
    std::array<std::int64_t, 6> counts{};  // [0]=area 1 ... [4]=area 5, [5]=area >= 6
    std::int64_t total = 0;

    double frequency(int slot) const {
        return total ? static_cast<double>(counts[static_cast<std::size_t>(slot)]) /
                           static_cast<double>(total)
                     : 0.0;
    }
};
AreaTable area_table_from_volumes(const std::vector<std::int64_t>& volumes);
/// Volumes at the birth of every recorded hole (split births included).
AreaTable hole_area_distribution_birth(const std::vector<HoleRecord>& holes);
/// Volumes of the holes alive at step t (latest volume sample <= t; exact
/// at event steps and at the end of a run).
AreaTable hole_area_distribution_at(const std::vector<HoleRecord>& holes, std::int64_t t);

struct ShapeRow {
    std::string shape_free;
    std::int64_t count = 0;
    double frequency = 0.0;
    int fixed_types = 0;       // fixed polyominoes in this free class
    double freq_per_fixed = 0.0;
};
/// Frequency of each free shape among holes of the given area; input pairs
/// are (volume, free shape key).  Rows sorted by decreasing frequency then
/// key.
std::vector<ShapeRow> shape_distribution(
    const std::vector<std::pair<std::int64_t, std::string>>& holes, std::int64_t area);

std::vector<std::pair<std::int64_t, std::string>> birth_shapes(
    const std::vector<HoleRecord>& holes);

/// Reconstructs the cell set of a canonical shape key.
std::vector<CellCoord> parse_shape_key(const std::string& key);

struct LargestHole {
    std::int64_t max_birth_volume = 0;
    std::int64_t max_birth_id = -1;
    std::int64_t max_live_volume = 0;
    std::int64_t max_live_id = -1;
};
LargestHole largest_hole(const std::vector<HoleRecord>& holes,
                         const std::vector<HoleTracker::LiveHole>& live);

/// One checkpoint row of the per-run series file.
struct SeriesRow {
    std::int64_t t = 0;
    std::int64_t P = 0;
    std::int64_t OutP = 0;
    std::int64_t InnP = 0;
    std::array<std::int64_t, kMaxDim - 1> beta{};  // beta[i-1] = beta_i
    std::uint8_t beta_mask = 0;

    void set_beta(int i, std::int64_t value) {
        beta[static_cast<std::size_t>(i - 1)] = value;
        beta_mask |= static_cast<std::uint8_t>(1u << (i - 1));
    }
    bool has_beta(int i) const { return (beta_mask >> (i - 1)) & 1; }
};

TimeSeries series_column(const std::vector<SeriesRow>& rows, const std::string& column);

/// beta_i(t) <= 2^{d-i} C(d,i) P_d(t) for every tracked beta at every
/// checkpoint; returns the first violating row index or -1.
std::int64_t check_betti_upper_bounds(const std::vector<SeriesRow>& rows, int d);

// series.csv: t,P,OutP,InnP,beta_1,...,beta_{d-1} (untracked betas empty).
void write_series_csv(std::ostream& os, int d, const std::vector<SeriesRow>& rows);
void write_series_csv_file(const std::string& path, int d, const std::vector<SeriesRow>& rows);
std::vector<SeriesRow> read_series_csv_file(const std::string& path, int& d_out);

// fits.csv: series,exponent,coefficient,tmin,tmax,residual.
void write_fits_csv(std::ostream& os,
                    const std::vector<std::pair<std::string, PowerLawFit>>& fits);
void write_fits_csv_file(const std::string& path,
                         const std::vector<std::pair<std::string, PowerLawFit>>& fits);

// areas.csv: mode,area,count,frequency with area 1..5 and "6+".
void write_areas_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, AreaTable>>& tables);
void write_areas_csv_file(const std::string& path,
                          const std::vector<std::pair<std::string, AreaTable>>& tables);

// shapes.csv: mode,area,shape_free,count,frequency,fixed_types,freq_per_fixed.
struct ShapeSection {
    std::string mode;
    std::int64_t area;
    std::vector<ShapeRow> rows;
};
void write_shapes_csv(std::ostream& os, const std::vector<ShapeSection>& sections);
void write_shapes_csv_file(const std::string& path, const std::vector<ShapeSection>& sections);

// normpers.csv: hdim,bin_lo,bin_hi,count,excluded_open.
void write_normpers_csv(std::ostream& os,
                        const std::vector<std::pair<int, NormalizedPersistence>>& hists);
void write_normpers_csv_file(const std::string& path,
                             const std::vector<std::pair<int, NormalizedPersistence>>& hists);

std::string format_double(double v);

}  // namespace eden
