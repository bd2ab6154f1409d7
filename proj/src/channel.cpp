#include "stochldpc/channel.hpp"

#include <cmath>

#include "stochldpc/errors.hpp"

namespace stochldpc {

double ebno_db_to_sigma2(double ebno_db, double rate) {
    if (!(rate > 0.0 && rate < 1.0)) raise(errc::invalid_rate, "rate must be in (0,1)");
    return 1.0 / (2.0 * rate * std::pow(10.0, ebno_db / 10.0));
}

std::vector<double> transmit_all_zero(int n, double sigma2, rng::Sequential& rng) {
    std::vector<double> y(n);
    double sigma = std::sqrt(sigma2);
    for (int i = 0; i < n; ++i) y[i] = 1.0 + sigma * rng.next_gaussian();
    return y;
}

namespace {

LikelihoodVector llr_to_probs(const std::vector<double>& y, double sigma2, double scale) {
    if (!(sigma2 > 0.0)) raise(errc::non_positive_variance, "sigma2 must be positive");
    LikelihoodVector mu(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double llr = scale * 2.0 * y[i] / sigma2; // log P(x=0|y) / P(x=1|y)
        mu[i] = clamp_prob(1.0 / (1.0 + std::exp(llr)));
    }
    return mu;
}

} // namespace

LikelihoodVector likelihoods(const std::vector<double>& y, double sigma2) {
    return llr_to_probs(y, sigma2, 1.0);
}

LikelihoodVector likelihoods(const std::vector<double>& y, const ChannelParams& params) {
    double scale = params.nds_enabled ? params.effective_nds() : 1.0;
    return llr_to_probs(y, params.sigma2, scale);
}

} // namespace stochldpc
