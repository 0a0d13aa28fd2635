//! Closed-form bounds, computed in exact integer arithmetic.

/// Smallest `k >= 0` with `(3/2)^k >= n`; 0 for `n <= 1`.
pub fn ceil_log_3_2(n: usize) -> usize {
    if n as u128 >= 1 << 40 {
        return ((n as f64).ln() / 1.5f64.ln()).ceil() as usize;
    }
    let n = n as u128;
    let (mut k, mut pow3, mut pow2) = (0, 1u128, 1u128);
    while pow3 < n * pow2 {
        pow3 *= 3;
        pow2 *= 2;
        k += 1;
    }
    k
}

/// Height limit for a separator tree on `n` vertices.
pub fn depth_bound(n: usize) -> usize {
    ceil_log_3_2(n) + 1
}

/// Track limit for the final layout built with `ell` vertices per layer.
pub fn track_bound(n: usize, ell: usize) -> usize {
    3 * ell * ceil_log_3_2(n) + 3 * ell
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(ceil_log_3_2(0), 0);
        assert_eq!(ceil_log_3_2(1), 0);
        assert_eq!(ceil_log_3_2(2), 2);
        assert_eq!(ceil_log_3_2(100), 12);
        assert_eq!(ceil_log_3_2(1000), 18);
        assert_eq!(ceil_log_3_2(5000), 22);
        assert_eq!(depth_bound(100), 13);
        assert_eq!(track_bound(100, 2), 78);
    }

    #[test]
    fn agrees_with_powers() {
        for n in 1..20_000usize {
            let k = ceil_log_3_2(n) as i32;
            assert!(1.5f64.powi(k) >= n as f64 - 1e-9);
            if k > 0 {
                assert!(1.5f64.powi(k - 1) < n as f64);
            }
        }
    }
}
