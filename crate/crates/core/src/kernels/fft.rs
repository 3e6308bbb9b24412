//! Iterative radix-2 FFT with unitary (`1/√N`) normalisation in both
//! directions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_power_of_two, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub fn fft(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    let mut out = v.to_vec();
    fft_in_place(&mut out, direction)?;
    Ok(out)
}

pub fn fft_in_place(data: &mut [Complex64], direction: Direction) -> Result<()> {
    let n = data.len();
    let bits = require_power_of_two(n)?;
    if n == 1 {
        return Ok(());
    }

    // bit-reversal permutation
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, ang * k as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * twiddles[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }

    let scale = 1.0 / (n as f64).sqrt();
    for x in data.iter_mut() {
        *x *= scale;
    }
    Ok(())
}

/// Integer wavenumber index of FFT bin `j`: `0, 1, …, N/2, −N/2+1, …, −1`.
pub fn wavenumber_index(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(v: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = v.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, x) in v.iter().enumerate() {
                    let ang = sign * 2.0 * PI * (j * k) as f64 / n as f64;
                    acc += x * Complex64::from_polar(1.0, ang);
                }
                acc / (n as f64).sqrt()
            })
            .collect()
    }

    fn random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn delta_and_constant() {
        let mut delta = vec![Complex64::new(0.0, 0.0); 8];
        delta[0] = Complex64::new(1.0, 0.0);
        let f = fft(&delta, Direction::Forward).unwrap();
        for x in &f {
            assert!((x - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        let ones = vec![Complex64::new(1.0, 0.0); 8];
        let f = fft(&ones, Direction::Forward).unwrap();
        assert!((f[0] - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(f[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn matches_naive_dft_and_roundtrips() {
        let v = random(64, 3);
        let f = fft(&v, Direction::Forward).unwrap();
        let oracle = naive_dft(&v, -1.0);
        for (a, b) in f.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
        let inv = fft(&f, Direction::Inverse).unwrap();
        for (a, b) in inv.iter().zip(&v) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = naive_dft(&f, 1.0);
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn unitary() {
        for n in [1, 2, 16, 256] {
            let v = random(n, n as u64);
            let f = fft(&v, Direction::Forward).unwrap();
            let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let nf: f64 = f.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            assert!((nv - nf).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(fft(&random(6, 1), Direction::Forward).is_err());
        assert!(fft(&[], Direction::Forward).is_err());
    }

    #[test]
    fn wavenumbers() {
        let k: Vec<i64> = (0..8).map(|j| wavenumber_index(j, 8)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }
}
