//! p-adic L-functions as measures on `Z_p^x`.
//!
//! A measure is stored on the balls `b + p^s Z_p` of a fixed depth `s`.
//! With `l(x) = log_p(x / omega(x)) / log_p(1 + p)` every unit is
//! `omega(x) (1 + p)^{l(x)}`, and on a ball `l = t + p^{s-1} lambda` for a
//! fixed integer centre `t`. We keep the moments of `lambda`: characters of
//! conductor dividing `p^s` are constant on the balls, `x^j` is a power
//! series in `lambda` with coefficients of valuation about `s n`, and
//! products of L-functions are convolutions, exact on these moments.

pub mod artin;
pub mod twist;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::arith::zmod::{log_one_unit, teichmuller};
use crate::arith::{vp_u64, Ring, Zp};
use crate::error::{Error, Result};
use crate::lift::OvcSymbol;
use crate::padic::{gauss_sum, DirichletCharacter, Embedding, PadicScalar};

pub use artin::{artin_ratio_test, ArtinReport, ArtinRow};
pub use twist::{twist_classical, twist_ovc, twist_symbol};

/// Moments of one ball `b + p^s Z_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub residue: u64,
    /// `l(b) mod p^{s-1}`, in `0..p^{s-1}`.
    pub centre: u64,
    /// `int lambda^m` for `m = 0, 1, ...`.
    pub moments: Vec<Zp>,
    /// `moments[m]` is correct modulo `p^digits[m]`.
    pub digits: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PadicL {
    pub p: u64,
    pub depth: u32,
    /// Working precision of the stored moments.
    pub prec: u32,
    /// The units below `p^depth`, in increasing order.
    pub branches: Vec<Branch>,
}

/// A value with the number of digits it is known to.
#[derive(Clone, Debug)]
pub struct LValue {
    pub value: PadicScalar,
    pub digits: i64,
}

impl LValue {
    /// Whether the value is zero to its precision.
    pub fn vanishes(&self) -> bool {
        truncate(&self.value, self.digits).is_zero_to_precision()
    }

    pub fn require_nonzero(self) -> Result<Self> {
        if self.vanishes() {
            return Err(Error::Precision(format!(
                "value is zero to the {} digits available",
                self.digits
            )));
        }
        Ok(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "value": self.value.to_string_short(), "digits": self.digits })
    }
}

/// Keep only the digits below `p^d`.
pub fn truncate(x: &PadicScalar, d: i64) -> PadicScalar {
    if x.abs_prec() <= d {
        return x.clone();
    }
    let z = x.normalise();
    if z.shift >= d || z.is_zero_to_precision() {
        let mut zero = PadicScalar::zero(x.p, x.ext, 0);
        zero.shift = d;
        return zero;
    }
    z.with_prec((d - z.shift) as u32)
}

/// `l(x) = log_p(x / omega(x)) / log_p(1 + p)`, modulo `p^prec`.
fn log_coordinate(p: u64, x: u64, prec: u32) -> Zp {
    let w = prec + 2;
    let u = log_one_unit(&Zp::new(p, w, 1 + p as i128)).div_p_pow(1);
    let omega = teichmuller(p, w, x % p).expect("x is prime to p");
    let ratio = Zp::new(p, w, x as i128).mul(&omega.inv().unwrap());
    log_one_unit(&ratio)
        .div_p_pow(1)
        .mul(&u.inv().unwrap())
        .reduce(prec)
}

/// The centre `t` (with `0 <= t < p^{s-1}`, `l(b) ≡ t`) and the coefficients
/// of `lambda(b + p^s z) = (l(b + p^s z) - t) / p^{s-1}` as a power series in
/// `z`, modulo `p^prec` and truncated below degree `deg`.
fn local_coordinate_series(p: u64, s: u32, b: u64, prec: u32, deg: usize) -> (u64, Vec<Zp>) {
    let ps1 = p.pow(s - 1);
    let lb = log_coordinate(p, b, prec + s);
    let t = lb.value() % ps1;
    let c0 = lb
        .sub(&Zp::new(p, prec + s, t as i128))
        .div_p_pow(s - 1)
        .reduce(prec);
    let u = log_one_unit(&Zp::new(p, prec + 2, 1 + p as i128))
        .div_p_pow(1)
        .reduce(prec);
    let uinv = u.inv().expect("log(1+p)/p is a unit");
    let binv = Zp::new(p, prec, b as i128).inv().unwrap();
    let mut out = vec![Zp::zero(p, prec); deg];
    out[0] = c0;
    let mut bpow = Zp::one(p, prec);
    // log(1 + p^s z / b) = sum (-1)^{m+1} (p^s z / b)^m / m, divided by p^s u
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        bpow = bpow.mul(&binv);
        let vm = vp_u64(m as u64, p);
        let e = s * (m as u32 - 1) - vm;
        let unit = Zp::new(p, prec, (m as u64 / p.pow(vm)) as i128)
            .inv()
            .unwrap();
        let mut c = bpow.mul(&unit).mul(&uinv).mul_p_pow(e);
        if m % 2 == 0 {
            c = c.neg();
        }
        *slot = c;
    }
    (t, out)
}

/// `l(b) mod p^{s-1}`.
fn centre_of(p: u64, s: u32, b: u64) -> u64 {
    log_coordinate(p, b, s).value() % p.pow(s - 1)
}

fn factorial_valuation(n: usize, p: u64) -> u32 {
    (1..=n as u64).map(|i| vp_u64(i, p)).sum()
}

fn poly_mul(a: &[Zp], b: &[Zp], deg: usize) -> Vec<Zp> {
    let like = a[0].zero_like();
    let mut out = vec![like; deg];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.vanishes()) {
        for (j, y) in b.iter().enumerate().take(deg - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// `int lambda^n` for `n < count` on one branch, from the moments
/// `mu[d] = mu(z^d)` of the pushforward along `z -> b + p^s z`. Moment `d`
/// of `mu` is known to `known - d` digits; later moments are unknown but
/// integral.
fn branch_moments(ell: &[Zp], mu: &[Zp], known: u32, count: usize) -> (Vec<Zp>, Vec<u32>) {
    let p = ell[0].p();
    let prec = ell[0].prec();
    let deg = ell.len();
    let mut power = vec![Zp::zero(p, prec); deg];
    power[0] = Zp::one(p, prec);
    let mut moments = Vec::with_capacity(count);
    let mut digits = Vec::with_capacity(count);
    for n in 0..count {
        if n > 0 {
            power = poly_mul(&power, ell, deg);
        }
        let mut acc = Zp::zero(p, prec);
        let mut d_n = known;
        for (d, e) in power.iter().enumerate() {
            let ve = e.valuation().unwrap_or(prec);
            if d < mu.len() {
                acc = acc.add(&e.mul(&mu[d].reduce(prec.min(mu[d].prec())).lift_to(prec)));
                d_n = d_n.min(ve + known.saturating_sub(d as u32));
            } else {
                d_n = d_n.min(ve);
            }
        }
        // z^d in lambda^n has valuation >= (d - n) / 2 past the truncation
        let tail = ((deg - n) / 2) as u32;
        moments.push(acc);
        digits.push(d_n.min(tail).min(known));
    }
    (moments, digits)
}

/// Mellin transform of an overconvergent eigensymbol: the measure with
/// `mu(b + p^r Z_p) = alpha^{-r} Phi({b/p^r -> oo})`, kept on the balls of
/// radius `p^{-depth}` with `count` local moments each.
pub fn mellin(phi: &OvcSymbol<Zp>, depth: u32, count: usize) -> Result<PadicL> {
    let p = phi.p();
    if depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    let known = phi.ledger.remaining().min(phi.module.nmom as u32);
    if known == 0 {
        return Err(Error::Precision("the symbol has no digits left".into()));
    }
    let ainv = phi
        .alpha
        .inv()
        .ok_or_else(|| Error::Config("alpha is not a unit".into()))?;
    let ainv_s = ainv.pow(depth as u64);
    let ps = p.pow(depth);
    let deg = count + 2 * known as usize + 2;
    let branches = (1..ps)
        .into_par_iter()
        .filter(|b| b % p != 0)
        .map(|b| {
            let mu =
                phi.symbol
                    .eval_to_infinity(&phi.manin, phi.module.as_ref(), b as i64, ps as i64);
            let mu: Vec<Zp> = mu.iter().map(|x| x.mul(&ainv_s)).collect();
            let (centre, ell) = local_coordinate_series(p, depth, b, known, deg);
            let (moments, digits) = branch_moments(&ell, &mu, known, count);
            Branch {
                residue: b,
                centre,
                moments,
                digits,
            }
        })
        .collect();
    Ok(PadicL {
        p,
        depth,
        prec: known,
        branches,
    })
}

impl PadicL {
    /// The Dirac measure at `1`.
    pub fn dirac_one(p: u64, depth: u32, prec: u32, count: usize) -> Self {
        let branches = (1..p.pow(depth))
            .filter(|b| b % p != 0)
            .map(|b| {
                let moments = (0..count)
                    .map(|m| {
                        if b == 1 && m == 0 {
                            Zp::one(p, prec)
                        } else {
                            Zp::zero(p, prec)
                        }
                    })
                    .collect();
                Branch {
                    residue: b,
                    centre: centre_of(p, depth, b),
                    moments,
                    digits: vec![prec; count],
                }
            })
            .collect();
        PadicL {
            p,
            depth,
            prec,
            branches,
        }
    }

    pub fn count(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.moments.len())
            .min()
            .unwrap_or(0)
    }

    fn branch_index(&self, b: u64) -> usize {
        // residues run over the units below p^depth in order
        let p = self.p;
        (b - 1 - (b - 1) / p) as usize
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if (self.p, self.depth) != (o.p, o.depth) {
            return Err(Error::Config(format!(
                "measures at (p, depth) = ({}, {}) and ({}, {})",
                self.p, self.depth, o.p, o.depth
            )));
        }
        Ok(())
    }

    fn combine(&self, o: &Self, f: impl Fn(&Zp, &Zp) -> Zp) -> Result<Self> {
        self.check_compatible(o)?;
        let prec = self.prec.min(o.prec);
        let count = self.count().min(o.count());
        let branches = self
            .branches
            .iter()
            .zip(&o.branches)
            .map(|(x, y)| Branch {
                residue: x.residue,
                centre: x.centre,
                moments: (0..count)
                    .map(|m| f(&x.moments[m].reduce(prec), &y.moments[m].reduce(prec)))
                    .collect(),
                digits: (0..count)
                    .map(|m| x.digits[m].min(y.digits[m]).min(prec))
                    .collect(),
            })
            .collect();
        Ok(PadicL {
            p: self.p,
            depth: self.depth,
            prec,
            branches,
        })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &Zp) -> Self {
        let mut out = self.clone();
        let c = c.reduce(self.prec.min(c.prec())).lift_to(self.prec);
        for b in &mut out.branches {
            for m in &mut b.moments {
                *m = m.mul(&c);
            }
        }
        out
    }

    /// Multiplicative convolution: `int f d(mu * nu) = int int f(x y) dmu dnu`.
    /// Its values at characters are the products of the values.
    pub fn convolve(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let p = self.p;
        let ps = p.pow(self.depth);
        let ps1 = p.pow(self.depth - 1);
        let prec = self.prec.min(o.prec);
        let count = self.count().min(o.count());
        let mut binom = vec![vec![Zp::one(p, prec)]];
        for n in 1..count {
            let mut row = vec![Zp::one(p, prec); n + 1];
            for i in 1..n {
                row[i] = binom[n - 1][i - 1].add(&binom[n - 1][i]);
            }
            binom.push(row);
        }
        let mut out = PadicL::dirac_one(p, self.depth, prec, count);
        for b in &mut out.branches {
            b.moments.iter_mut().for_each(|m| *m = Zp::zero(p, prec));
        }
        for x in &self.branches {
            for y in &o.branches {
                let idx = self.branch_index(x.residue * y.residue % ps);
                // lambda(xy) = lambda(x) + lambda(y) + delta
                let delta = (x.centre + y.centre - out.branches[idx].centre) / ps1;
                let mut sum = vec![Zp::zero(p, prec); count];
                let mut sum_digits = vec![prec; count];
                for m in 0..count {
                    for i in 0..=m {
                        let t = binom[m][i]
                            .mul(&x.moments[i].reduce(prec))
                            .mul(&y.moments[m - i].reduce(prec));
                        sum[m] = sum[m].add(&t);
                        sum_digits[m] = sum_digits[m].min(x.digits[i]).min(y.digits[m - i]);
                    }
                }
                let target = &mut out.branches[idx];
                let dz = Zp::new(p, prec, delta as i128);
                for m in 0..count {
                    let mut acc = Zp::zero(p, prec);
                    let mut dpow = Zp::one(p, prec);
                    let mut d = prec;
                    for i in (0..=m).rev() {
                        acc = acc.add(&binom[m][i].mul(&dpow).mul(&sum[i]));
                        d = d.min(sum_digits[i]);
                        dpow = dpow.mul(&dz);
                    }
                    target.moments[m] = target.moments[m].add(&acc);
                    target.digits[m] = target.digits[m].min(d);
                }
            }
        }
        Ok(out)
    }

    /// `int_{Z_p^x} chi(x) x^j dmu` for a character of modulus `p^r`, `r <= depth`.
    pub fn evaluate(&self, chi: &DirichletCharacter, j: u32) -> Result<LValue> {
        let p = self.p;
        let r = p_power_exponent(chi.modulus, p)?;
        if r > self.depth {
            return Err(Error::Config(format!(
                "character mod {} needs depth {r}, the measure has depth {}",
                chi.modulus, self.depth
            )));
        }
        let prec = self.prec;
        let count = self.count();
        let w = prec + factorial_valuation(count, p) + 1;
        // x^j = x_b^j exp(L lambda) on the branch, L = j p^{s-1} log(1+p)
        let big_l = log_one_unit(&Zp::new(p, w, 1 + p as i128))
            .mul(&Zp::new(p, w, j as i128))
            .mul_p_pow(self.depth - 1);
        let vl = big_l.valuation();
        let mut coeffs = vec![Zp::one(p, prec)];
        let mut coeff_vals = vec![0u32];
        let mut lpow = Zp::one(p, w);
        let mut fact = BigInt::one();
        for n in 1..count {
            lpow = lpow.mul(&big_l);
            fact *= n;
            let vf = crate::arith::vp_int(&fact, p);
            let unit = fact.clone() / BigInt::from(p).pow(vf);
            let c = lpow
                .div_p_pow(vf)
                .mul(&Zp::from_bigint(p, w, &unit).inv().unwrap());
            coeff_vals.push(lpow.valuation().map_or(w, |v| v - vf));
            coeffs.push(c.reduce(prec));
        }
        let used = if vl.is_none() { 1 } else { count };
        // terms past the last are L^n / n! * (integral), of valuation >= n (v(L) - 1/(p-1))
        let tail = match vl {
            None => i64::MAX,
            Some(v) => ((used as f64) * (v as f64 - 1.0 / (p as f64 - 1.0))).floor() as i64,
        };
        let emb = Embedding::standard(p, r, prec);
        let mut value = emb.zero();
        let mut digits = tail.min(prec as i64);
        let gamma = Zp::new(p, prec, 1 + p as i128);
        for b in &self.branches {
            let mut inner = Zp::zero(p, prec);
            for n in 0..used {
                inner = inner.add(&coeffs[n].mul(&b.moments[n].reduce(prec)));
                digits = digits.min(b.digits[n] as i64 + coeff_vals[n] as i64);
            }
            let xb = teichmuller(p, prec, b.residue % p)
                .unwrap()
                .mul(&gamma.pow(b.centre));
            let lead = emb
                .character_value(chi, (b.residue % chi.modulus) as i64)
                .mul(&emb.from_zp(&xb.pow(j as u64)));
            value = value.add(&lead.mul(&emb.from_zp(&inner)));
        }
        Ok(LValue {
            value: truncate(&value, digits),
            digits,
        })
    }

    /// The mass of every ball `b + p^s Z_p`, `1 <= s <= depth`, as
    /// `(s, b, mass, digits)`.
    pub fn ball_masses(&self) -> Vec<(u32, u64, Zp, u32)> {
        let p = self.p;
        let mut out = Vec::new();
        for s in 1..=self.depth {
            let ps = p.pow(s);
            for b in (1..ps).filter(|b| b % p != 0) {
                let mut mass = Zp::zero(p, self.prec);
                let mut d = self.prec;
                for br in self.branches.iter().filter(|x| x.residue % ps == b) {
                    mass = mass.add(&br.moments[0].reduce(self.prec));
                    d = d.min(br.digits[0]);
                }
                out.push((s, b, mass, d));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let branches: Vec<_> = self
            .branches
            .iter()
            .map(|b| {
                json!({
                    "residue": b.residue,
                    "centre": b.centre,
                    "moments": b.moments.iter().map(|z| z.value().to_string()).collect::<Vec<_>>(),
                    "digits": b.digits,
                })
            })
            .collect();
        json!({ "p": self.p, "depth": self.depth, "prec": self.prec, "branches": branches })
    }
}

fn p_power_exponent(m: u64, p: u64) -> Result<u32> {
    let mut r = 0;
    let mut x = m;
    while x % p == 0 && x > 1 {
        x /= p;
        r += 1;
    }
    if x != 1 {
        return Err(Error::Config(format!("modulus {m} is not a power of {p}")));
    }
    Ok(r)
}

/// Which interpolation normalisation to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Interpolation {
    /// Over `Q`: `p^{r(j+1)} / (alpha^r tau(chi^{-1}))`, or the two Euler
    /// factors `(1 - p^j/alpha)(1 - p^{k-j}/alpha)` for trivial `chi`.
    Rational,
    /// For the base change to an imaginary quadratic field of discriminant
    /// `-d` with `w` units, where `p` splits:
    /// `d^{j+1} p^{2r(j+1)} w / ((-1)^k 2 alpha^{2r} tau_F)` with
    /// `tau_F = tau(chi^{-1})^2`.
    Bianchi { d: u64, w: u64 },
}

/// The factor `e` with `evaluate(chi, j) = e * classical_l_value(chi, j)`.
pub fn interpolation_factor(
    alpha: &Zp,
    k: u32,
    chi: &DirichletCharacter,
    j: u32,
    mode: Interpolation,
    prec: u32,
) -> Result<PadicScalar> {
    let p = alpha.p();
    let r = p_power_exponent(chi.modulus, p)?;
    let emb = Embedding::standard(p, r, prec);
    let a = emb.from_zp(alpha);
    let ainv = a
        .inv()
        .ok_or_else(|| Error::Config("alpha is not a unit".into()))?;
    if r == 0 {
        if mode != Interpolation::Rational {
            return Err(Error::Config(
                "the base-change factor needs a character of conductor > 1".into(),
            ));
        }
        let e1 = emb.one().sub(&ainv.mul_p_pow(j as i64));
        let e2 = emb.one().sub(&ainv.mul_p_pow(k as i64 - j as i64));
        return Ok(e1.mul(&e2));
    }
    if !chi.is_primitive() {
        return Err(Error::Config(format!(
            "character mod {} is not primitive",
            chi.modulus
        )));
    }
    let tau = gauss_sum(&chi.conj(), &emb)?;
    let tinv = tau
        .inv()
        .ok_or_else(|| Error::Precision("Gauss sum not invertible to this precision".into()))?;
    let rj = (r * (j + 1)) as i64;
    match mode {
        Interpolation::Rational => Ok(ainv.pow(r as u64).mul(&tinv).mul_p_pow(rj)),
        Interpolation::Bianchi { d, w } => {
            let num = PadicScalar::from_q(
                p,
                emb.ext(),
                prec,
                &crate::arith::q((d.pow(j + 1) * w) as i64),
            );
            let mut f = num
                .mul(&ainv.pow(2 * r as u64))
                .mul(&tinv)
                .mul(&tinv)
                .mul_p_pow(2 * rj);
            let half = PadicScalar::from_q(p, emb.ext(), prec, &crate::arith::q_frac(1, 2));
            f = f.mul(&half);
            if k % 2 == 1 {
                f = f.neg();
            }
            Ok(f)
        }
    }
}

/// Growth of the ball masses: the least valuation of `mu(b + p^s Z_p)` on
/// each layer `s`, and `h` from the slope of a least-squares line. An
/// `h`-admissible distribution has masses of valuation `>= -h s + c`.
#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    /// `(s, least valuation on layer s)`.
    pub layers: Vec<(u32, f64)>,
    pub slope: f64,
    pub h: f64,
}

pub fn admissibility_profile(l: &PadicL) -> Result<Admissibility> {
    let mut layers: Vec<(u32, f64)> = Vec::new();
    for (s, _, mass, digits) in l.ball_masses() {
        if digits == 0 {
            continue;
        }
        let v = mass.valuation().unwrap_or(digits).min(digits) as f64;
        match layers.last_mut() {
            Some(last) if last.0 == s => last.1 = last.1.min(v),
            _ => layers.push((s, v)),
        }
    }
    if layers.len() < 3 {
        return Err(Error::Precision(format!(
            "only {} layers of ball masses; use depth >= 3",
            layers.len()
        )));
    }
    let n = layers.len() as f64;
    let mx = layers.iter().map(|x| x.0 as f64).sum::<f64>() / n;
    let my = layers.iter().map(|x| x.1).sum::<f64>() / n;
    let sxy: f64 = layers.iter().map(|x| (x.0 as f64 - mx) * (x.1 - my)).sum();
    let sxx: f64 = layers.iter().map(|x| (x.0 as f64 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(Admissibility {
        layers,
        slope,
        h: (-slope).max(0.0),
    })
}

/// The ordinary overconvergent lift of `f` at `p`: stabilise with the unit
/// root and lift with `nmom` moments.
pub fn lift_newform(f: &crate::modsym::Newform, p: u64, nmom: usize) -> Result<OvcSymbol<Zp>> {
    let phi = &f.phi;
    let ap = f
        .a(p)
        .ok_or_else(|| Error::Config(format!("no a_{p} known for {}", f.form.label)))?;
    let (alpha, beta) = crate::lift::unit_root(ap, phi.k, p, nmom as u32 + 4)?;
    let to = std::sync::Arc::new(crate::modsym::Manin::new(phi.level() * p));
    let stab = crate::lift::stabilise_zp(phi, &to, p, &alpha, &beta)?;
    crate::lift::lift_symbol(&stab, &to, p, phi.k, &alpha, nmom, None)
}

#[cfg(test)]
mod tests;
