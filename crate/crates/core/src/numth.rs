//! Integer utilities: trial-division factorization, p-adic valuation,
//! floor division and the Smith normal form of 2×2 integer matrices.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumthError {
    #[error("expected a positive integer, got {0}")]
    NotPositive(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("matrix {0:?} is singular")]
    Singular(Matrix2),
}

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: i64,
    pub factors: Vec<(i64, u32)>,
}

impl Factorization {
    /// The set of prime divisors, ascending.
    pub fn primes(&self) -> impl Iterator<Item = i64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

pub fn factorize(n: i64) -> Result<Factorization, NumthError> {
    if n <= 0 {
        return Err(NumthError::NotPositive(n));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn is_prime(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation. Zero is divisible by every power, hence `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

pub fn sigma_p(p: i64, n: i64) -> Result<Valuation, NumthError> {
    if !is_prime(p) {
        return Err(NumthError::NotPrime(p));
    }
    if n == 0 {
        return Ok(Valuation::Infinite);
    }
    let mut n = n.abs();
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Ok(Valuation::Finite(v))
}

/// Floor division: returns `(q, r)` with `j = q*l + r` and `0 <= r < l`.
pub fn euclid_divmod(j: i64, l: i64) -> Result<(i64, i64), NumthError> {
    if l <= 0 {
        return Err(NumthError::NotPositive(l));
    }
    Ok((j.div_euclid(l), j.rem_euclid(l)))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

/// Row-major 2×2 integer matrix.
pub type Matrix2 = [[i64; 2]; 2];

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(a: &Matrix2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Smith normal form `left * input * right = diag(d1, d2)` with `d1 | d2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf2x2 {
    pub input: Matrix2,
    pub d1: i64,
    pub d2: i64,
    pub left: Matrix2,
    pub right: Matrix2,
}

const IDENTITY: Matrix2 = [[1, 0], [0, 1]];

// Row operations act on `m` and `left`, column operations on `m` and `right`.
struct Reducer {
    m: Matrix2,
    left: Matrix2,
    right: Matrix2,
}

impl Reducer {
    fn swap_rows(&mut self) {
        self.m.swap(0, 1);
        self.left.swap(0, 1);
    }

    fn swap_cols(&mut self) {
        for row in self.m.iter_mut().chain(self.right.iter_mut()) {
            row.swap(0, 1);
        }
    }

    /// row[dst] -= k * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, k: i64) {
        for c in 0..2 {
            self.m[dst][c] -= k * self.m[src][c];
            self.left[dst][c] -= k * self.left[src][c];
        }
    }

    /// col[dst] -= k * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, k: i64) {
        for r in 0..2 {
            self.m[r][dst] -= k * self.m[r][src];
            self.right[r][dst] -= k * self.right[r][src];
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..2 {
            self.m[r][c] = -self.m[r][c];
            self.left[r][c] = -self.left[r][c];
        }
    }

    /// Moves the entry of least nonzero absolute value to (0,0).
    fn pivot(&mut self) {
        let mut best = (0, 0);
        for r in 0..2 {
            for c in 0..2 {
                let v = self.m[r][c].abs();
                let b = self.m[best.0][best.1].abs();
                if v != 0 && (b == 0 || v < b) {
                    best = (r, c);
                }
            }
        }
        if best.0 == 1 {
            self.swap_rows();
        }
        if best.1 == 1 {
            self.swap_cols();
        }
    }
}

pub fn snf_2x2(input: Matrix2) -> Result<Snf2x2, NumthError> {
    if det(&input) == 0 {
        return Err(NumthError::Singular(input));
    }
    let mut r = Reducer {
        m: input,
        left: IDENTITY,
        right: IDENTITY,
    };
    loop {
        r.pivot();
        let p = r.m[0][0];
        let q_row = r.m[1][0].div_euclid(p);
        r.row_axpy(1, 0, q_row);
        let q_col = r.m[0][1].div_euclid(p);
        r.col_axpy(1, 0, q_col);
        if r.m[1][0] != 0 || r.m[0][1] != 0 {
            continue;
        }
        // Diagonal now; enforce divisibility by folding row 1 into row 0.
        if r.m[1][1] % r.m[0][0] != 0 {
            r.row_axpy(0, 1, -1);
            continue;
        }
        break;
    }
    for i in 0..2 {
        if r.m[i][i] < 0 {
            r.negate_row(i);
        }
    }
    Ok(Snf2x2 {
        input,
        d1: r.m[0][0],
        d2: r.m[1][1],
        left: r.left,
        right: r.right,
    })
}
