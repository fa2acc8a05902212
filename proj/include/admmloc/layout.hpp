// admmloc: block layout and flat per-node state containers.
//
// Every per-node vector in the solver is a flat Eigen vector carved into
// named blocks. Two independent measurement channels decide which blocks
// exist: the cooperative channel (own position x plus inbound/outbound
// position copies p⁻/p⁺, one per neighbor) and the target channel (local
// target estimate y plus copies q⁻/q⁺). The joint solver enables both; the
// two-stage pipeline runs them separately.
#pragma once

#include <Eigen/Core>
#include <cassert>

namespace admmloc {

/** Which measurement channels a state vector carries. */
struct Channels {
    bool cooperative = true;  ///< inter-sensor distance terms (x, p⁻, p⁺)
    bool target = true;       ///< target range terms (y, q⁻, q⁺)

    friend bool operator==(const Channels&, const Channels&) = default;
};

/**
 * Block geometry of one node's vectors: neighbor count, spatial dimension,
 * active channels, and the offsets of each named block inside flat storage.
 *
 * Flat order (joint): [ x | p⁻_0..p⁻_{N-1} | p⁺_0..p⁺_{N-1} | y | q⁻ | q⁺ ],
 * each block of length `dim`, neighbor blocks sorted by ascending neighbor id.
 * Channel-reduced layouts simply drop the absent half.
 */
struct BlockLayout {
    int neighbors = 0;  ///< N: degree of the node
    int dim = 0;        ///< n: spatial dimension
    Channels channels;

    static BlockLayout joint(int neighbors, int dim) {
        return {neighbors, dim, {true, true}};
    }
    static BlockLayout cooperative_only(int neighbors, int dim) {
        return {neighbors, dim, {true, false}};
    }
    static BlockLayout target_only(int neighbors, int dim) {
        return {neighbors, dim, {false, true}};
    }

    /** Total flat length of a state vector z. */
    int z_size() const {
        int blocks = (channels.cooperative ? 2 * neighbors + 1 : 0) +
                     (channels.target ? 2 * neighbors + 1 : 0);
        return blocks * dim;
    }
    /** Number of measurement residual blocks (rows of the data map). */
    int measurement_blocks() const {
        return (channels.cooperative ? neighbors : 0) + (channels.target ? 1 : 0);
    }
    /** Number of copy-consistency residual blocks (rows of the coupling map). */
    int constraint_blocks() const {
        return (channels.cooperative ? neighbors : 0) +
               (channels.target ? 2 * neighbors : 0);
    }
    /** Number of auxiliary unit-ball direction blocks. */
    int aux_blocks() const { return measurement_blocks(); }

    // Offsets (in doubles) of the named blocks inside flat z storage.
    int x_offset() const {
        assert(channels.cooperative);
        return 0;
    }
    int p_minus_offset(int k) const {
        assert(channels.cooperative && k >= 0 && k < neighbors);
        return (1 + k) * dim;
    }
    int p_plus_offset(int k) const {
        assert(channels.cooperative && k >= 0 && k < neighbors);
        return (1 + neighbors + k) * dim;
    }
    int y_offset() const {
        assert(channels.target);
        return channels.cooperative ? (2 * neighbors + 1) * dim : 0;
    }
    int q_minus_offset(int k) const {
        assert(k >= 0 && k < neighbors);
        return y_offset() + (1 + k) * dim;
    }
    int q_plus_offset(int k) const {
        assert(k >= 0 && k < neighbors);
        return y_offset() + (1 + neighbors + k) * dim;
    }

    // Row-block indices into measurement-residual stacks (v-direction order).
    int position_row(int k) const {
        assert(channels.cooperative);
        return k;
    }
    int target_row() const {
        assert(channels.target);
        return channels.cooperative ? neighbors : 0;
    }

    // Row-block indices into coupling stacks / multiplier stacks.
    int p_constraint_row(int k) const {
        assert(channels.cooperative);
        return k;
    }
    int q_minus_constraint_row(int k) const {
        assert(channels.target);
        return (channels.cooperative ? neighbors : 0) + k;
    }
    int q_plus_constraint_row(int k) const {
        assert(channels.target);
        return (channels.cooperative ? neighbors : 0) + neighbors + k;
    }

    friend bool operator==(const BlockLayout&, const BlockLayout&) = default;
};

/** A stack of equally sized n-vectors stored flat (residuals, rows, ...). */
class StackedBlocks {
public:
    StackedBlocks() = default;
    StackedBlocks(int blocks, int dim)
        : dim_(dim), raw_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks) * dim)) {}

    int blocks() const { return dim_ == 0 ? 0 : static_cast<int>(raw_.size()) / dim_; }
    int dim() const { return dim_; }

    Eigen::Ref<Eigen::VectorXd> block(int k) { return raw_.segment(static_cast<Eigen::Index>(k) * dim_, dim_); }
    Eigen::Ref<const Eigen::VectorXd> block(int k) const {
        return raw_.segment(static_cast<Eigen::Index>(k) * dim_, dim_);
    }

    Eigen::VectorXd& flat() { return raw_; }
    const Eigen::VectorXd& flat() const { return raw_; }

private:
    int dim_ = 0;
    Eigen::VectorXd raw_;
};

/** One node's primal vector z with named block accessors. */
class NodeLocalVector {
public:
    NodeLocalVector() = default;
    explicit NodeLocalVector(const BlockLayout& layout)
        : layout_(layout), raw_(Eigen::VectorXd::Zero(layout.z_size())) {}

    const BlockLayout& layout() const { return layout_; }

    Eigen::Ref<Eigen::VectorXd> x() { return seg(layout_.x_offset()); }
    Eigen::Ref<const Eigen::VectorXd> x() const { return seg(layout_.x_offset()); }
    Eigen::Ref<Eigen::VectorXd> p_minus(int k) { return seg(layout_.p_minus_offset(k)); }
    Eigen::Ref<const Eigen::VectorXd> p_minus(int k) const { return seg(layout_.p_minus_offset(k)); }
    Eigen::Ref<Eigen::VectorXd> p_plus(int k) { return seg(layout_.p_plus_offset(k)); }
    Eigen::Ref<const Eigen::VectorXd> p_plus(int k) const { return seg(layout_.p_plus_offset(k)); }
    Eigen::Ref<Eigen::VectorXd> y() { return seg(layout_.y_offset()); }
    Eigen::Ref<const Eigen::VectorXd> y() const { return seg(layout_.y_offset()); }
    Eigen::Ref<Eigen::VectorXd> q_minus(int k) { return seg(layout_.q_minus_offset(k)); }
    Eigen::Ref<const Eigen::VectorXd> q_minus(int k) const { return seg(layout_.q_minus_offset(k)); }
    Eigen::Ref<Eigen::VectorXd> q_plus(int k) { return seg(layout_.q_plus_offset(k)); }
    Eigen::Ref<const Eigen::VectorXd> q_plus(int k) const { return seg(layout_.q_plus_offset(k)); }

    Eigen::VectorXd& flat() { return raw_; }
    const Eigen::VectorXd& flat() const { return raw_; }

private:
    Eigen::Ref<Eigen::VectorXd> seg(int off) { return raw_.segment(off, layout_.dim); }
    Eigen::Ref<const Eigen::VectorXd> seg(int off) const { return raw_.segment(off, layout_.dim); }

    BlockLayout layout_;
    Eigen::VectorXd raw_;
};

/** Auxiliary unit-ball directions: one v per neighbor edge plus one u for the target. */
class AuxiliaryDirections {
public:
    AuxiliaryDirections() = default;
    explicit AuxiliaryDirections(const BlockLayout& layout)
        : layout_(layout),
          raw_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.aux_blocks()) * layout.dim)) {}

    const BlockLayout& layout() const { return layout_; }

    Eigen::Ref<Eigen::VectorXd> v(int k) { return seg(layout_.position_row(k)); }
    Eigen::Ref<const Eigen::VectorXd> v(int k) const { return seg(layout_.position_row(k)); }
    Eigen::Ref<Eigen::VectorXd> u() { return seg(layout_.target_row()); }
    Eigen::Ref<const Eigen::VectorXd> u() const { return seg(layout_.target_row()); }

    int blocks() const { return layout_.aux_blocks(); }
    Eigen::Ref<Eigen::VectorXd> block(int k) { return seg(k); }
    Eigen::Ref<const Eigen::VectorXd> block(int k) const { return seg(k); }

    Eigen::VectorXd& flat() { return raw_; }
    const Eigen::VectorXd& flat() const { return raw_; }

private:
    Eigen::Ref<Eigen::VectorXd> seg(int k) { return raw_.segment(static_cast<Eigen::Index>(k) * layout_.dim, layout_.dim); }
    Eigen::Ref<const Eigen::VectorXd> seg(int k) const {
        return raw_.segment(static_cast<Eigen::Index>(k) * layout_.dim, layout_.dim);
    }

    BlockLayout layout_;
    Eigen::VectorXd raw_;
};

/** Multipliers for the copy-consistency constraints, one block per coupling row. */
class Multipliers {
public:
    Multipliers() = default;
    explicit Multipliers(const BlockLayout& layout)
        : layout_(layout),
          raw_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.constraint_blocks()) * layout.dim)) {}

    const BlockLayout& layout() const { return layout_; }

    /** Multiplier of x_i − p⁻_{i,k} (cooperative channel). */
    Eigen::Ref<Eigen::VectorXd> l1(int k) { return seg(layout_.p_constraint_row(k)); }
    Eigen::Ref<const Eigen::VectorXd> l1(int k) const { return seg(layout_.p_constraint_row(k)); }
    /** Multiplier of y_i − q⁻_{i,k} (target channel). */
    Eigen::Ref<Eigen::VectorXd> l2(int k) { return seg(layout_.q_minus_constraint_row(k)); }
    Eigen::Ref<const Eigen::VectorXd> l2(int k) const { return seg(layout_.q_minus_constraint_row(k)); }
    /** Multiplier of y_i − q⁺_{i,k} (target channel). */
    Eigen::Ref<Eigen::VectorXd> l3(int k) { return seg(layout_.q_plus_constraint_row(k)); }
    Eigen::Ref<const Eigen::VectorXd> l3(int k) const { return seg(layout_.q_plus_constraint_row(k)); }

    int blocks() const { return layout_.constraint_blocks(); }
    Eigen::Ref<Eigen::VectorXd> block(int k) { return seg(k); }
    Eigen::Ref<const Eigen::VectorXd> block(int k) const { return seg(k); }

    Eigen::VectorXd& flat() { return raw_; }
    const Eigen::VectorXd& flat() const { return raw_; }

private:
    Eigen::Ref<Eigen::VectorXd> seg(int k) { return raw_.segment(static_cast<Eigen::Index>(k) * layout_.dim, layout_.dim); }
    Eigen::Ref<const Eigen::VectorXd> seg(int k) const {
        return raw_.segment(static_cast<Eigen::Index>(k) * layout_.dim, layout_.dim);
    }

    BlockLayout layout_;
    Eigen::VectorXd raw_;
};

}  // namespace admmloc
