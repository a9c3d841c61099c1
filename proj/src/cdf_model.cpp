#include "ksamc/cdf_model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ksamc/channel.hpp"
#include "ksamc/ks_core.hpp"

namespace ksamc {

namespace {

constexpr std::string_view kMagic = "KSAMC-CDF v1";

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw TableFormatError(TableErrc::Header, "bad number '" + std::string(s) + "'");
    return v;
}

std::string read_line(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw TableFormatError(TableErrc::Truncated, "table header ends early");
    return line;
}

std::string_view header_value(std::string_view line, std::string_view key)
{
    if (line.size() <= key.size() || line.substr(0, key.size()) != key ||
        line[key.size()] != '=')
        throw TableFormatError(TableErrc::Header,
                               "expected header field '" + std::string(key) + "'");
    return line.substr(key.size() + 1);
}

std::uint64_t to_little_endian(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        return __builtin_bswap64(v);
    return v;
}

}  // namespace

double theoretical_cdf_eval(Modulation format, double sigma, double z)
{
    return TheoreticalCdf(format, sigma)(z);
}

TheoreticalCdf::TheoreticalCdf(Modulation format, double sigma)
    : format_(format), sigma_(sigma), levels_(constellation_points(format).real_levels())
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("theoretical CDF needs sigma > 0");
    inv_scale_ = std::numbers::sqrt2 / sigma;
}

double TheoreticalCdf::operator()(double z) const
{
    // 1 - mean Q0(sqrt2 (z - x) / sigma), written as mean Q0(-a) to keep the
    // lower tail accurate
    double sum = 0.0;
    for (double x : levels_)
        sum += gaussian_q(-(z - x) * inv_scale_);
    return std::clamp(sum / static_cast<double>(levels_.size()), 0.0, 1.0);
}

QuantizedCdfTable::QuantizedCdfTable(std::vector<Modulation> formats, double snr_start,
                                     double snr_step, std::size_t snr_count,
                                     std::vector<double> values)
    : formats_(std::move(formats)), snr_start_(snr_start), snr_step_(snr_step),
      snr_count_(snr_count), values_(std::move(values))
{
    if (formats_.empty() || snr_count_ == 0)
        throw std::invalid_argument("CDF table needs at least one format and one SNR");
    if (!(snr_step_ > 0.0))
        throw std::invalid_argument("CDF table SNR step must be positive");
    if (values_.size() != formats_.size() * snr_count_ * CdfZGrid::kCount)
        throw std::invalid_argument("CDF table payload size does not match its grids");
}

bool QuantizedCdfTable::contains(Modulation format) const
{
    return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
}

std::size_t QuantizedCdfTable::format_slot(Modulation format) const
{
    auto it = std::find(formats_.begin(), formats_.end(), format);
    if (it == formats_.end())
        throw std::out_of_range("CDF table has no curves for " + std::string(to_string(format)));
    return static_cast<std::size_t>(it - formats_.begin());
}

std::size_t QuantizedCdfTable::nearest_snr_index(double snr_db) const
{
    const double pos = (snr_db - snr_start_) / snr_step_;
    const double idx = std::ceil(pos - 0.5);
    if (!(idx > 0.0))
        return 0;
    return std::min(static_cast<std::size_t>(idx), snr_count_ - 1);
}

std::span<const double> QuantizedCdfTable::row(Modulation format, std::size_t snr_index) const
{
    if (snr_index >= snr_count_)
        throw std::out_of_range("CDF table SNR index out of range");
    const std::size_t offset = (format_slot(format) * snr_count_ + snr_index) * CdfZGrid::kCount;
    return std::span<const double>(values_).subspan(offset, CdfZGrid::kCount);
}

std::vector<double> anchored_snr_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("anchored_snr_grid: need step > 0 and hi >= lo");
    const double first = std::floor(lo / step + 1e-9);
    const double last = std::ceil(hi / step - 1e-9);
    std::vector<double> grid;
    for (double k = first; k <= last; k += 1.0)
        grid.push_back(k * step);
    return grid;
}

QuantizedCdfTable build_cdf_table(std::span<const Modulation> formats,
                                  std::span<const double> snr_grid_db, double granularity_db)
{
    if (formats.empty())
        throw std::invalid_argument("build_cdf_table: no formats");
    if (snr_grid_db.empty())
        throw std::invalid_argument("build_cdf_table: empty SNR grid");
    if (!(granularity_db > 0.0))
        throw std::invalid_argument("build_cdf_table: granularity must be positive");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
        const double gap = snr_grid_db[i] - snr_grid_db[i - 1];
        if (std::abs(gap - granularity_db) > 1e-9 * std::max(1.0, granularity_db))
            throw std::invalid_argument("build_cdf_table: SNR grid is not uniformly spaced by the "
                                        "granularity");
    }

    auto fmts = canonical_candidates(formats);
    const double start = snr_grid_db.front();
    const std::size_t count = snr_grid_db.size();
    std::vector<double> values;
    values.reserve(fmts.size() * count * CdfZGrid::kCount);
    for (Modulation f : fmts) {
        for (std::size_t s = 0; s < count; ++s) {
            const double snr = start + static_cast<double>(s) * granularity_db;
            const TheoreticalCdf cdf(f, std::sqrt(snr_db_to_sigma_sq(snr)));
            for (std::size_t i = 0; i < CdfZGrid::kCount; ++i)
                values.push_back(cdf(CdfZGrid::node(i)));
        }
    }
    return QuantizedCdfTable(std::move(fmts), start, granularity_db, count, std::move(values));
}

double interpolate_cdf_row(std::span<const double> row, double z)
{
    if (z < CdfZGrid::kMin)
        return 0.0;
    if (z > CdfZGrid::kMax)
        return 1.0;
    const double pos = z * 100.0 + 400.0;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9)
        return row[static_cast<std::size_t>(nearest)];
    const auto i = std::min(static_cast<std::size_t>(pos), CdfZGrid::kCount - 2);
    const double frac = pos - static_cast<double>(i);
    return row[i] + frac * (row[i + 1] - row[i]);
}

double table_lookup(const QuantizedCdfTable& table, Modulation format, double snr_db, double z)
{
    return interpolate_cdf_row(table.row(format, table.nearest_snr_index(snr_db)), z);
}

void serialize_table(const QuantizedCdfTable& table, std::ostream& out)
{
    out << kMagic << '\n';
    out << "formats=";
    for (std::size_t i = 0; i < table.formats().size(); ++i)
        out << (i ? "," : "") << to_string(table.formats()[i]);
    out << '\n';
    out << "snr_db=" << format_double(table.snr_start()) << ':'
        << format_double(table.snr_step()) << ':'
        << format_double(table.snr_node(table.snr_count() - 1)) << '\n';
    out << "z=-4:0.01:4\n\n";
    for (double v : table.values()) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        out.write(buf, 8);
    }
}

std::string serialize_table(const QuantizedCdfTable& table)
{
    std::ostringstream out(std::ios::binary);
    serialize_table(table, out);
    return std::move(out).str();
}

QuantizedCdfTable deserialize_table(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw TableFormatError(TableErrc::Version, "not a KSAMC-CDF v1 table");

    line = read_line(in);
    std::vector<Modulation> formats;
    try {
        auto list = header_value(line, "formats");
        while (true) {
            const auto comma = list.find(',');
            formats.push_back(parse_modulation(list.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            list.remove_prefix(comma + 1);
        }
    } catch (const std::invalid_argument& e) {
        throw TableFormatError(TableErrc::Header, e.what());
    }
    // payload order follows the header, which must be strictly ascending
    if (!std::is_sorted(formats.begin(), formats.end()) ||
        std::adjacent_find(formats.begin(), formats.end()) != formats.end())
        throw TableFormatError(TableErrc::Header, "table formats must be listed once, ascending");

    line = read_line(in);
    const auto snr = header_value(line, "snr_db");
    const auto c1 = snr.find(':');
    const auto c2 = snr.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
        throw TableFormatError(TableErrc::Header, "snr_db must be start:step:stop");
    const double start = parse_double(snr.substr(0, c1));
    const double step = parse_double(snr.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_double(snr.substr(c2 + 1));
    if (!(step > 0.0) || !(stop >= start))
        throw TableFormatError(TableErrc::Header, "snr_db grid is empty or has a bad step");
    const double span = (stop - start) / step;
    const double rounded = std::round(span);
    if (std::abs(span - rounded) > 1e-6)
        throw TableFormatError(TableErrc::Header, "snr_db stop is not on the step grid");
    const auto count = static_cast<std::size_t>(rounded) + 1;

    line = read_line(in);
    if (line != "z=-4:0.01:4")
        throw TableFormatError(TableErrc::Header, "unsupported z grid '" + line + "'");
    line = read_line(in);
    if (!line.empty())
        throw TableFormatError(TableErrc::Header, "expected blank line after header");

    const std::size_t n = formats.size() * count * CdfZGrid::kCount;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        char buf[8];
        if (!in.read(buf, 8))
            throw TableFormatError(TableErrc::Truncated, "table payload is truncated");
        std::uint64_t bits;
        std::memcpy(&bits, buf, 8);
        values[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw TableFormatError(TableErrc::TrailingData, "unexpected bytes after table payload");

    for (std::size_t r = 0; r < n; r += CdfZGrid::kCount) {
        for (std::size_t i = 0; i < CdfZGrid::kCount; ++i) {
            const double v = values[r + i];
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw TableFormatError(TableErrc::BadValue, "table value outside [0, 1]");
            if (i > 0 && v < values[r + i - 1])
                throw TableFormatError(TableErrc::NonMonotone, "table curve decreases along z");
        }
    }
    return QuantizedCdfTable(std::move(formats), start, step, count, std::move(values));
}

QuantizedCdfTable deserialize_table(const std::string& bytes)
{
    std::istringstream in(bytes, std::ios::binary);
    return deserialize_table(in);
}

}  // namespace ksamc
