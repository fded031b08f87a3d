//! Integer 2x2 matrices `[[a, b], [c, d]]`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

pub const IDENTITY: Mat2 = Mat2 {
    a: 1,
    b: 0,
    c: 0,
    d: 1,
};
pub const S: Mat2 = Mat2 {
    a: 0,
    b: -1,
    c: 1,
    d: 0,
};
pub const TAU: Mat2 = Mat2 {
    a: 0,
    b: -1,
    c: 1,
    d: -1,
};
pub const IOTA: Mat2 = Mat2 {
    a: -1,
    b: 0,
    c: 0,
    d: 1,
};
pub const MINUS_ONE: Mat2 = Mat2 {
    a: -1,
    b: 0,
    c: 0,
    d: -1,
};

impl Mat2 {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant `+-1` matrix.
    pub fn inv_unimodular(&self) -> Mat2 {
        let det = self.det();
        assert!(det == 1 || det == -1, "not unimodular: {self:?}");
        Mat2 {
            a: self.d * det,
            b: -self.b * det,
            c: -self.c * det,
            d: self.a * det,
        }
    }

    /// Image of a cusp `num/den` (`den = 0` meaning infinity) under the
    /// fractional linear action, reduced to lowest terms with `den >= 0`.
    pub fn act_cusp(&self, num: i64, den: i64) -> (i64, i64) {
        normalise_cusp(self.a * num + self.b * den, self.c * num + self.d * den)
    }
}

pub fn normalise_cusp(n: i64, d: i64) -> (i64, i64) {
    let g = num_integer::gcd(n, d);
    assert!(g != 0, "0/0 is not a cusp");
    let (mut n, mut d) = (n / g, d / g);
    if d < 0 || (d == 0 && n < 0) {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Unimodular matrices `g_j` (determinant 1) with
/// `{oo -> num/den} = sum_j g_j {0 -> oo}`, from the continued fraction.
pub fn unimodular_path(num: i64, den: i64) -> Vec<Mat2> {
    let (num, den) = normalise_cusp(num, den);
    if den == 0 {
        return vec![];
    }
    // convergents p_j/q_j with p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0
    let (mut pm2, mut qm2, mut pm1, mut qm1) = (0i64, 1i64, 1i64, 0i64);
    let (mut x, mut y) = (num, den);
    let mut out = Vec::new();
    loop {
        let a = x.div_euclid(y);
        let r = x.rem_euclid(y);
        let (pj, qj) = (a * pm1 + pm2, a * qm1 + qm2);
        let mut g = Mat2::new(pj, pm1, qj, qm1);
        if g.det() == -1 {
            g.b = -g.b;
            g.d = -g.d;
        }
        debug_assert_eq!(g.det(), 1);
        out.push(g);
        pm2 = pm1;
        qm2 = qm1;
        pm1 = pj;
        qm1 = qj;
        if r == 0 {
            break;
        }
        x = y;
        y = r;
    }
    debug_assert_eq!((pm1, qm1), (num, den));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_steps_chain_from_infinity() {
        for (n, d) in [(3, 7), (-5, 11), (0, 1), (22, 9), (1, 1), (-13, 4)] {
            let steps = unimodular_path(n, d);
            let mut cur = (1, 0);
            for g in &steps {
                assert_eq!(g.det(), 1);
                assert_eq!(g.act_cusp(0, 1), cur);
                cur = g.act_cusp(1, 0);
            }
            assert_eq!(cur, normalise_cusp(n, d));
        }
    }

    #[test]
    fn tau_has_order_three_in_psl2() {
        let t3 = TAU.mul(&TAU).mul(&TAU);
        assert!(t3 == IDENTITY || t3 == MINUS_ONE);
        assert_eq!(S.mul(&S), MINUS_ONE);
    }
}
