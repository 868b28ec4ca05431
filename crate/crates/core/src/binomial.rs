//! Binomial coefficients and tail sums that stay accurate for large trial counts.

use statrs::function::factorial::ln_binomial;

/// Summation stops once a term falls below this fraction of the running sum.
const TERM_CUTOFF: f64 = 1e-18;

/// `C(n, k)` as a float; exact whenever the running products stay below 2^53.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if k <= 60 && n <= 1030 {
        let mut acc = 1.0f64;
        for j in 1..=k {
            // Multiplying before dividing keeps every partial product an integer.
            acc = acc * (n - k + j) as f64 / j as f64;
        }
        return acc.round();
    }
    ln_binomial(n, k).exp()
}

/// `C(n, k) p^k (1 - p)^(n - k)`.
pub fn pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let c = choose(n, k);
    if c.is_finite() && c < 1e280 {
        let v = c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        if v.is_normal() || v == 0.0 {
            return v;
        }
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// `P(X >= k)` for `X ~ Binomial(n, p)`.
///
/// Sums whichever side of the distribution lies away from the mean, starting
/// from the term nearest the mean and walking outward with the pmf ratio, so
/// no step subtracts two nearly equal numbers and no coefficient overflows.
pub fn upper_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let odds = p / (1.0 - p);
    if k as f64 > n as f64 * p {
        // Upper tail directly: terms decrease from k upward.
        let mut term = pmf(n, k, p);
        let mut sum = term;
        let mut i = k;
        while i < n {
            term *= (n - i) as f64 / (i + 1) as f64 * odds;
            sum += term;
            i += 1;
            if term <= sum * TERM_CUTOFF {
                break;
            }
        }
        sum.clamp(0.0, 1.0)
    } else {
        // Complement: terms decrease from k - 1 downward.
        let mut term = pmf(n, k - 1, p);
        let mut lower = term;
        let mut i = k - 1;
        while i > 0 {
            term *= i as f64 / (n - i + 1) as f64 / odds;
            lower += term;
            i -= 1;
            if term <= lower * TERM_CUTOFF {
                break;
            }
        }
        (1.0 - lower).clamp(0.0, 1.0)
    }
}
