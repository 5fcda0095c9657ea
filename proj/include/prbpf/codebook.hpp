#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "prbpf/encoder.hpp"
#include "prbpf/errors.hpp"
#include "prbpf/io.hpp"
#include "prbpf/parallel.hpp"
#include "prbpf/rotation_distribution.hpp"
#include "prbpf/rotation_grid.hpp"

namespace prbpf {

/// Cosine similarities against every codebook entry, in [-1, 1].
using SimilarityScores = std::vector<float>;

/// One unit-norm embedding per rotation bin, rendered/encoded at the
/// canonical translation (0, 0, z_canonical). Codes are stored contiguously
/// per bin so the similarity kernel streams memory linearly. Immutable after
/// construction and safe to share across threads.
class Codebook {
  public:
    Codebook(std::string object_id, const RotationGrid& grid, int dim, double z_canonical,
             std::uint32_t roi_size, std::vector<float> codes)
        : object_id_(std::move(object_id)),
          grid_(grid),
          dim_(dim),
          z_canonical_(z_canonical),
          roi_size_(roi_size),
          codes_(std::move(codes)) {
        if (codes_.size() != grid_.total() * static_cast<std::size_t>(dim_))
            throw std::domain_error("Codebook: code matrix size does not match grid x dim");
    }

    const std::string& object_id() const { return object_id_; }
    const RotationGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    double z_canonical() const { return z_canonical_; }
    std::uint32_t roi_size() const { return roi_size_; }
    const float* code(std::size_t bin) const { return codes_.data() + bin * dim_; }
    const std::vector<float>& codes() const { return codes_; }

  private:
    std::string object_id_;
    RotationGrid grid_;
    int dim_;
    double z_canonical_;
    std::uint32_t roi_size_;
    std::vector<float> codes_;
};

/// Encodes every bin center and normalizes the embeddings into a codebook.
inline Codebook build_codebook(const Encoder& encoder, const RotationGrid& grid,
                               std::string object_id, double z_canonical,
                               std::uint32_t roi_size, int n_threads = 0) {
    const int dim = encoder.dim();
    const std::size_t n = grid.total();
    std::vector<float> codes(n * static_cast<std::size_t>(dim));
    const int nt = resolve_threads(n_threads);
    std::string failure;
#pragma omp parallel for num_threads(nt) schedule(static)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(n); ++j) {
        try {
            Embedding e = encoder.encode_canonical(bin_center(static_cast<std::size_t>(j), grid));
            if (e.size() != dim) throw std::runtime_error("dimension mismatch");
            const float norm = e.norm();
            if (!(norm > 0.0f) || !std::isfinite(norm))
                throw std::runtime_error("non-finite or zero embedding");
            e /= norm;
            std::copy(e.data(), e.data() + dim, codes.begin() + j * dim);
        } catch (const std::exception& ex) {
#pragma omp critical
            if (failure.empty())
                failure = "encoder failed at bin " + std::to_string(j) + ": " + ex.what();
        }
    }
    if (!failure.empty()) throw std::runtime_error("build_codebook: " + failure);
    return Codebook(std::move(object_id), grid, dim, z_canonical, roi_size, std::move(codes));
}

// ---------------------------------------------------------------------------
// Binary format: magic "PRBC", version u32, object_id (u16 length + UTF-8),
// grid dims (3 x u32), embedding dim u32, canonical distance f64 meters, RoI
// size u32 pixels; payload row-major little-endian f32, bin-major
// (grid.total rows x dim). All integers little-endian.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kCodebookVersion = 1;

inline void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open for write: " + tmp.string());
        out.write("PRBC", 4);
        io::write_u32(out, kCodebookVersion);
        io::write_u16(out, static_cast<std::uint16_t>(cb.object_id().size()));
        out.write(cb.object_id().data(), static_cast<std::streamsize>(cb.object_id().size()));
        io::write_u32(out, static_cast<std::uint32_t>(cb.grid().n_azimuth()));
        io::write_u32(out, static_cast<std::uint32_t>(cb.grid().n_elevation()));
        io::write_u32(out, static_cast<std::uint32_t>(cb.grid().n_inplane()));
        io::write_u32(out, static_cast<std::uint32_t>(cb.dim()));
        io::write_f64(out, cb.z_canonical());
        io::write_u32(out, cb.roi_size());
        io::write_f32_array(out, cb.codes());
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw FormatError("short write: " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open codebook: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "PRBC")
        throw FormatError("bad codebook magic: " + path.string());
    const std::uint32_t version = io::read_u32(in);
    if (version != kCodebookVersion)
        throw FormatError("unsupported codebook version " + std::to_string(version));
    const std::uint16_t id_len = io::read_u16(in);
    std::string object_id(id_len, '\0');
    in.read(object_id.data(), id_len);
    const std::uint32_t n_az = io::read_u32(in);
    const std::uint32_t n_el = io::read_u32(in);
    const std::uint32_t n_ip = io::read_u32(in);
    const std::uint32_t dim = io::read_u32(in);
    const double z_canonical = io::read_f64(in);
    const std::uint32_t roi_size = io::read_u32(in);
    if (!in) throw FormatError("truncated codebook header: " + path.string());
    if (n_az == 0 || dim == 0) throw FormatError("bad codebook header: " + path.string());
    RotationGrid grid = RotationGrid::with_step(360.0 / n_az);
    if (static_cast<std::uint32_t>(grid.n_elevation()) != n_el ||
        static_cast<std::uint32_t>(grid.n_inplane()) != n_ip)
        throw FormatError("inconsistent grid dims in codebook header: " + path.string());

    const std::streamoff payload_start = in.tellg();
    in.seekg(0, std::ios::end);
    const std::streamoff file_end = in.tellg();
    const std::streamoff expected =
        static_cast<std::streamoff>(grid.total()) * dim * static_cast<std::streamoff>(4);
    if (file_end - payload_start != expected)
        throw FormatError("codebook payload size mismatch (dims vs header): " + path.string());
    in.seekg(payload_start);

    std::vector<float> codes(grid.total() * dim);
    io::read_f32_array(in, codes);
    if (!in) throw FormatError("truncated codebook payload: " + path.string());
    return Codebook(std::move(object_id), grid, static_cast<int>(dim), z_canonical, roi_size,
                    std::move(codes));
}

// ---------------------------------------------------------------------------
// Similarity kernels
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr std::int64_t kSimilarityBlock = 8192;  // bins per GEMM block
}

/// Cosine similarity of each query column against every codebook entry.
/// `queries` is dim x P; `scores_out` receives P rows of grid.total() scores
/// (row-major, one contiguous row per query). The throughput-critical kernel:
/// one blocked matrix product streaming the code matrix once per frame.
inline void similarity_scores_batch(const Eigen::MatrixXf& queries, const Codebook& cb,
                                    float* scores_out, int n_threads = 0) {
    if (queries.rows() != cb.dim())
        throw std::domain_error("similarity_scores_batch: dimension mismatch");
    const std::int64_t n = static_cast<std::int64_t>(cb.grid().total());
    const std::int64_t p = queries.cols();
    Eigen::MatrixXf qn = queries;
    for (std::int64_t i = 0; i < p; ++i) {
        const float norm = qn.col(i).norm();
        if (!(norm > 0.0f)) throw std::domain_error("similarity_scores_batch: zero query");
        qn.col(i) /= norm;
    }
    const Eigen::Map<const Eigen::MatrixXf> codes(cb.codes().data(), cb.dim(), n);
    const std::int64_t n_blocks = (n + detail::kSimilarityBlock - 1) / detail::kSimilarityBlock;
    const int nt = resolve_threads(n_threads);
#pragma omp parallel for num_threads(nt) schedule(static)
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        const std::int64_t b0 = b * detail::kSimilarityBlock;
        const std::int64_t bw = std::min(detail::kSimilarityBlock, n - b0);
        Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> out(
            scores_out, p, n);
        out.middleCols(b0, bw).noalias() = qn.transpose() * codes.middleCols(b0, bw);
    }
}

/// Single-query convenience wrapper over the batched kernel.
inline SimilarityScores similarity_scores(const Embedding& code, const Codebook& cb,
                                          int n_threads = 0) {
    SimilarityScores scores(cb.grid().total());
    Eigen::MatrixXf q(code.size(), 1);
    q.col(0) = code;
    similarity_scores_batch(q, cb, scores.data(), n_threads);
    return scores;
}

namespace detail {

// Gaussian in score space centered at the shared per-frame maximum; written
// as one Eigen expression so every caller computes bit-identical values.
inline void likelihood_from_scores(const float* scores, std::size_t n, double smax,
                                   double inv_two_sigma_sq, double* out) {
    Eigen::Map<const Eigen::ArrayXf> s(scores, static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::ArrayXd> dst(out, static_cast<Eigen::Index>(n));
    dst = (-(smax - s.cast<double>()).square() * inv_two_sigma_sq).exp();
}

}  // namespace detail

/// Converts per-particle similarity scores to unnormalized rotation
/// likelihoods: exp(-(s* - s_j)^2 / (2 sigma^2)) with s* the maximum score
/// over all particles and bins in the frame. The shared center couples the
/// particles; the missing density normalization cancels when particle weights
/// are normalized.
inline std::vector<RotationDistribution> scores_to_likelihoods(
    const std::vector<SimilarityScores>& per_particle_scores, double sigma,
    const RotationGrid& grid) {
    if (per_particle_scores.empty())
        throw std::domain_error("scores_to_likelihoods: no particles");
    if (!(sigma > 0.0)) throw std::domain_error("scores_to_likelihoods: sigma must be positive");
    double smax = -2.0;
    for (const auto& scores : per_particle_scores) {
        if (scores.size() != grid.total())
            throw std::domain_error("scores_to_likelihoods: score size does not match grid");
        for (float s : scores) smax = std::max(smax, static_cast<double>(s));
    }
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    std::vector<RotationDistribution> out;
    out.reserve(per_particle_scores.size());
    for (const auto& scores : per_particle_scores) {
        RotationDistribution d = RotationDistribution::zeros(grid);
        detail::likelihood_from_scores(scores.data(), scores.size(), smax, inv2s2, d.data());
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace prbpf
