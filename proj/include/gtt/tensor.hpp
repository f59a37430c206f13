#ifndef GTT_TENSOR_HPP
#define GTT_TENSOR_HPP

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gtt {

// Dense contiguous buffer with a fixed shape. Scalar is float by
// default; double builds are used for gradient checking.
template <class S>
struct Tensor {
    std::vector<int> shape;
    std::vector<S> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> shp)
        : shape(std::move(shp)), v(count(shape), S(0)) {}

    static std::size_t count(const std::vector<int>& shp) {
        std::size_t n = 1;
        for (int d : shp) {
            if (d <= 0) throw std::invalid_argument("tensor: non-positive dim");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::size_t size() const { return v.size(); }
    S* data() { return v.data(); }
    const S* data() const { return v.data(); }
    void zero() { std::fill(v.begin(), v.end(), S(0)); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

} // namespace gtt

#endif
