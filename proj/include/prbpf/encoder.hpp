#pragma once

#include <Eigen/Core>

#include "prbpf/camera.hpp"
#include "prbpf/frame.hpp"
#include "prbpf/rotation_grid.hpp"

namespace prbpf {

using Embedding = Eigen::VectorXf;

/// Produces viewpoint embeddings. encode_canonical() encodes the object seen
/// from `view` at the canonical translation (codebook construction);
/// encode_roi() encodes the image crop implied by a translation hypothesis.
/// Implementations must be deterministic: identical inputs, identical codes.
class Encoder {
  public:
    virtual ~Encoder() = default;
    virtual int dim() const = 0;
    virtual Embedding encode_canonical(const EulerAngles& view) const = 0;
    virtual Embedding encode_roi(const Frame& frame, const Roi& roi) const = 0;
};

/// Replays per-frame embeddings precomputed by an external encoder. The code
/// does not depend on the RoI, so this is only meaningful for evaluating a
/// fixed detection stream.
class PrecomputedEncoder : public Encoder {
  public:
    explicit PrecomputedEncoder(int dim) : dim_(dim) {}
    int dim() const override { return dim_; }
    Embedding encode_canonical(const EulerAngles&) const override {
        throw std::logic_error("PrecomputedEncoder cannot render canonical views");
    }
    Embedding encode_roi(const Frame& frame, const Roi&) const override {
        if (!frame.embedding)
            throw std::runtime_error("frame " + std::to_string(frame.index) +
                                     " carries no precomputed embedding");
        return *frame.embedding;
    }

  private:
    int dim_;
};

}  // namespace prbpf
