#include "marlow/patchwork.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace marlow {

namespace {

std::vector<int> lattice(int extent, int n, int stride) {
    std::vector<int> starts;
    for (int s = 0; s <= extent - n; s += stride) starts.push_back(s);
    if (starts.back() != extent - n) starts.push_back(extent - n);
    return starts;
}

void check_fits(const Image& img, int n) {
    if (img.width() < n || img.height() < n) {
        throw Error("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " is smaller than the " + std::to_string(n) + "x" + std::to_string(n) + " patch");
    }
}

struct Candidate {
    double cost;
    Position pos;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    return std::tie(a.cost, a.pos.row, a.pos.col) < std::tie(b.cost, b.pos.row, b.pos.col);
}

void collect(const Image& img, Position ref, int n, int row_lo, int row_hi, int col_lo, int col_hi,
             std::vector<Candidate>& out) {
    out.clear();
    for (int r = row_lo; r <= row_hi; ++r) {
        for (int c = col_lo; c <= col_hi; ++c) {
            const Position p{r, c};
            if (p == ref) continue;
            out.push_back({patch_distance(img, ref, p, n), p});
        }
    }
}

}  // namespace

void PatchGeometry::validate() const {
    if (n < 1) throw Error("patch size must be >= 1");
    if (channels != 1 && channels != 3) throw Error("patch channel count must be 1 or 3");
    if (stride < 1 || stride > n) {
        throw Error("stride must lie in [1, n]; got stride " + std::to_string(stride) + " for n " + std::to_string(n));
    }
    if (search_radius < 0) throw Error("search radius must be non-negative");
    if (group_size < 1) throw Error("group size must be >= 1");
}

std::vector<Position> enumerate_refs(int width, int height, const PatchGeometry& geom) {
    geom.validate();
    if (width < geom.n || height < geom.n) {
        throw Error("image " + std::to_string(width) + "x" + std::to_string(height) + " is smaller than the patch");
    }
    const auto rows = lattice(height, geom.n, geom.stride);
    const auto cols = lattice(width, geom.n, geom.stride);
    std::vector<Position> refs;
    refs.reserve(rows.size() * cols.size());
    for (int r : rows) {
        for (int c : cols) refs.push_back({r, c});
    }
    return refs;
}

double patch_distance(const Image& img, Position a, Position b, int n) {
    const int span = n * img.channels();
    const auto data = img.data();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* pa = data.data() + img.index(a.row + i, a.col);
        const double* pb = data.data() + img.index(b.row + i, b.col);
        for (int k = 0; k < span; ++k) {
            const double d = pa[k] - pb[k];
            sum += d * d;
        }
    }
    return sum;
}

PatchGroup match_patches(const Image& img, Position ref, const PatchGeometry& geom) {
    geom.validate();
    if (img.channels() != geom.channels) throw Error("match_patches: image/geometry channel mismatch");
    check_fits(img, geom.n);
    const int max_row = img.height() - geom.n;
    const int max_col = img.width() - geom.n;
    if (ref.row < 0 || ref.col < 0 || ref.row > max_row || ref.col > max_col) {
        throw Error("match_patches: reference position out of bounds");
    }
    const auto total = static_cast<long long>(max_row + 1) * (max_col + 1);
    if (total < geom.group_size) {
        throw Error("match_patches: image holds only " + std::to_string(total) + " patch positions, group size is " +
                    std::to_string(geom.group_size));
    }

    std::vector<Candidate> cands;
    const int r = geom.search_radius;
    collect(img, ref, geom.n, std::max(0, ref.row - r), std::min(max_row, ref.row + r), std::max(0, ref.col - r),
            std::min(max_col, ref.col + r), cands);
    if (static_cast<int>(cands.size()) + 1 < geom.group_size) {
        collect(img, ref, geom.n, 0, max_row, 0, max_col, cands);
    }

    const auto keep = static_cast<std::size_t>(geom.group_size - 1);
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), candidate_less);

    PatchGroup group{{}, geom.n, geom.channels};
    group.coords.reserve(geom.group_size);
    group.coords.push_back(ref);
    for (std::size_t i = 0; i < keep; ++i) group.coords.push_back(cands[i].pos);
    return group;
}

Eigen::MatrixXd extract_group(const Image& img, const PatchGroup& group) {
    const int n = group.n;
    const int h = img.channels();
    if (h != group.channels) throw Error("extract_group: image/group channel mismatch");
    const int block = n * n;
    Eigen::MatrixXd out(block * h, group.size());
    for (int j = 0; j < group.size(); ++j) {
        const auto p = group.coords[j];
        if (p.row < 0 || p.col < 0 || p.row + n > img.height() || p.col + n > img.width()) {
            throw Error("extract_group: patch at (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                        ") is out of bounds");
        }
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                for (int k = 0; k < h; ++k) out(k * block + y * n + x, j) = img.at(p.row + y, p.col + x, k);
            }
        }
    }
    return out;
}

void scatter_group(const Eigen::MatrixXd& patches, const PatchGroup& group, Image& sums, std::vector<double>* counts) {
    const int n = group.n;
    const int h = sums.channels();
    const int block = n * n;
    if (patches.rows() != block * h || patches.cols() != group.size()) {
        throw Error("scatter_group: estimate shape does not match the group");
    }
    for (int j = 0; j < group.size(); ++j) {
        const auto p = group.coords[j];
        if (p.row < 0 || p.col < 0 || p.row + n > sums.height() || p.col + n > sums.width()) {
            throw Error("scatter_group: patch out of bounds");
        }
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                for (int k = 0; k < h; ++k) sums.at(p.row + y, p.col + x, k) += patches(k * block + y * n + x, j);
                if (counts) (*counts)[static_cast<std::size_t>(p.row + y) * sums.width() + p.col + x] += 1.0;
            }
        }
    }
}

Aggregator::Aggregator(int width, int height, int channels)
    : sums_(width, height, channels, 0.0), counts_(static_cast<std::size_t>(width) * height, 0.0) {}

void Aggregator::add(const PatchGroup& group, const Eigen::MatrixXd& estimate) {
    scatter_group(estimate, group, sums_, &counts_);
}

Image Aggregator::finish() const {
    Image out = sums_;
    const int h = out.channels();
    for (int r = 0; r < out.height(); ++r) {
        for (int c = 0; c < out.width(); ++c) {
            const double cnt = counts_[static_cast<std::size_t>(r) * out.width() + c];
            if (cnt == 0.0) {
                throw Error("aggregate: pixel (" + std::to_string(r) + "," + std::to_string(c) +
                            ") is not covered by any patch");
            }
            for (int k = 0; k < h; ++k) out.at(r, c, k) /= cnt;
        }
    }
    return out;
}

Image aggregate(std::span<const GroupEstimate> estimates, int width, int height, int channels) {
    Aggregator acc(width, height, channels);
    for (const auto& e : estimates) acc.add(e.group, e.estimate);
    return acc.finish();
}

}  // namespace marlow
