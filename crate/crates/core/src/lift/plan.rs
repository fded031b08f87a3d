//! Solving the Manin relations for an arbitrary coefficient module.
//!
//! Cosets are oriented edges of the Farey tessellation modulo `Gamma_0(N)`:
//! `S` pairs the two orientations and `tau` cycles the edges of a triangle.
//! Values on the edges of a spanning tree of the dual graph are solved from
//! the triangle relations, leaf to root; every other edge is free. The root
//! triangle's relation is then restored by a linear correction on the free
//! edges in the moments above the classical ones.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::arith::{Ring, Zp};
use crate::dist::{DistCoeff, DistModule};
use crate::error::{Error, Result};
use crate::linalg::solve_zp;
use crate::modsym::mat2::{S, TAU};
use crate::modsym::{Action, Manin, Mat2, Symbol};

#[derive(Clone, Debug)]
pub struct LiftPlan {
    pub manin: Arc<Manin>,
    s: Vec<usize>,
    /// Representatives of free pairs `{c, s(c)}`.
    pub free: Vec<usize>,
    /// Cosets with `s(c) = c`.
    order2: Vec<usize>,
    /// Cosets with `t(c) = c`.
    order3: Vec<usize>,
    /// For each non-root triangle, leaves first: the coset solved from its
    /// triangle relation (its partner lies in the parent triangle).
    steps: Vec<usize>,
    /// A coset of the root triangle.
    pub root: usize,
}

impl LiftPlan {
    pub fn new(manin: Arc<Manin>, p: u64) -> Result<Self> {
        let n = manin.ncosets();
        let s: Vec<usize> = manin
            .reps
            .iter()
            .map(|g| manin.coset_of(&g.mul(&S)))
            .collect();
        let t: Vec<usize> = manin
            .reps
            .iter()
            .map(|g| manin.coset_of(&g.mul(&TAU)))
            .collect();
        let order2: Vec<usize> = (0..n).filter(|&c| s[c] == c).collect();
        let order3: Vec<usize> = (0..n).filter(|&c| t[c] == c).collect();
        if p == 2 {
            return Err(Error::Config("p = 2 is not supported".into()));
        }
        // triangles of size 3, indexed by their smallest coset
        let mut tri_of = vec![usize::MAX; n];
        let mut tris: Vec<usize> = Vec::new();
        for c in 0..n {
            if tri_of[c] != usize::MAX || t[c] == c {
                continue;
            }
            let id = tris.len();
            tris.push(c);
            tri_of[c] = id;
            tri_of[t[c]] = id;
            tri_of[t[t[c]]] = id;
        }
        if tris.is_empty() {
            return Err(Error::Config("no triangles to solve".into()));
        }
        let root_tri = tri_of[manin.identity_coset()];
        let root_tri = if root_tri == usize::MAX { 0 } else { root_tri };
        // breadth-first spanning tree over pairs joining distinct triangles
        let mut seen = vec![false; tris.len()];
        let mut tree_pair = vec![false; n];
        let mut bfs: Vec<usize> = Vec::new(); // solved coset per discovered triangle
        let mut queue = VecDeque::from([root_tri]);
        seen[root_tri] = true;
        while let Some(tri) = queue.pop_front() {
            let c0 = tris[tri];
            for c in [c0, t[c0], t[t[c0]]] {
                let d = s[c];
                if d == c || t[d] == d {
                    continue;
                }
                let other = tri_of[d];
                if !seen[other] {
                    seen[other] = true;
                    tree_pair[c] = true;
                    tree_pair[d] = true;
                    bfs.push(d);
                    queue.push_back(other);
                }
            }
        }
        if seen.iter().any(|x| !x) {
            return Err(Error::Check(
                "dual graph of the triangulation is disconnected".into(),
            ));
        }
        let mut free = Vec::new();
        for c in 0..n {
            let d = s[c];
            if d == c || t[c] == c || t[d] == d || tree_pair[c] {
                continue;
            }
            if c < d {
                free.push(c);
            }
        }
        bfs.reverse();
        Ok(LiftPlan {
            root: tris[root_tri],
            manin,
            s,
            free,
            order2,
            order3,
            steps: bfs,
        })
    }

    fn partner<R: Ring>(&self, act: &dyn Action<R>, c: usize, x: &[R]) -> Vec<R> {
        // x_{s(c)} = -x_c | (g_c S g_{s(c)}^{-1})
        let g = &self.manin.reps;
        let h = g[c].mul(&S).mul(&g[self.s[c]].inv_unimodular());
        act.act(x, &h).iter().map(|v| v.neg()).collect()
    }

    fn eval<R: Ring>(&self, act: &dyn Action<R>, x: &[Option<Vec<R>>], g: &Mat2) -> Vec<R> {
        let c = self.manin.coset_of(g);
        let h = self.manin.reps[c].mul(&g.inv_unimodular());
        act.act(x[c].as_ref().expect("value not yet assigned"), &h)
    }

    /// Project a naive value at an elliptic coset onto the relation.
    fn project<R: Ring>(&self, act: &dyn Action<R>, c: usize, nu: &[R]) -> Vec<R> {
        let g = self.manin.reps[c];
        if self.s[c] == c {
            // (nu - nu|h) / 2, h = g S^{-1} g^{-1}
            let h = g.mul(&S.inv_unimodular()).mul(&g.inv_unimodular());
            let nh = act.act(nu, &h);
            nu.iter()
                .zip(&nh)
                .map(|(a, b)| a.sub(b).div_int(2))
                .collect()
        } else {
            // (2 nu - nu|h - nu|h^2) / 3, h = g tau^{-1} g^{-1}
            let h = g.mul(&TAU.inv_unimodular()).mul(&g.inv_unimodular());
            let n1 = act.act(nu, &h);
            let n2 = act.act(&n1, &h);
            nu.iter()
                .zip(n1.iter().zip(&n2))
                .map(|(a, (b, c))| a.mul_i64(2).sub(b).sub(c).div_int(3))
                .collect()
        }
    }

    /// Cosets whose values are inputs: free representatives, then elliptic
    /// cosets.
    fn inputs(&self) -> Vec<usize> {
        self.free
            .iter()
            .chain(&self.order2)
            .chain(&self.order3)
            .copied()
            .collect()
    }

    /// Fill in all coset values from the inputs; returns the symbol and the
    /// defects of the relations not imposed by construction (root triangle,
    /// then the elliptic cosets).
    fn propagate<R: Ring>(&self, act: &dyn Action<R>, inputs: &[Vec<R>]) -> (Symbol<R>, Vec<R>) {
        let n = self.manin.ncosets();
        let mut x: Vec<Option<Vec<R>>> = vec![None; n];
        for (&c, v) in self.inputs().iter().zip(inputs) {
            if self.s[c] != c {
                x[self.s[c]] = Some(self.partner(act, c, v));
            }
            x[c] = Some(v.clone());
        }
        let g = &self.manin.reps;
        for &c in &self.steps {
            let a = self.eval(act, &x, &g[c].mul(&TAU));
            let b = self.eval(act, &x, &g[c].mul(&TAU).mul(&TAU));
            let v: Vec<R> = a.iter().zip(&b).map(|(p, q)| p.add(q).neg()).collect();
            x[self.s[c]] = Some(self.partner(act, c, &v));
            x[c] = Some(v);
        }
        let triangle = |c: usize, x: &[Option<Vec<R>>]| {
            let mut d = x[c].clone().expect("coset unassigned");
            for m in [g[c].mul(&TAU), g[c].mul(&TAU).mul(&TAU)] {
                for (d, e) in d.iter_mut().zip(self.eval(act, x, &m)) {
                    *d = d.add(&e);
                }
            }
            d
        };
        let mut defect = triangle(self.root, &x);
        for &c in &self.order2 {
            let e = self.eval(act, &x, &g[c].mul(&S));
            defect.extend(x[c].as_ref().unwrap().iter().zip(&e).map(|(a, b)| a.add(b)));
        }
        for &c in &self.order3 {
            defect.extend(triangle(c, &x));
        }
        let values = x
            .into_iter()
            .map(|v| v.expect("coset left unassigned"))
            .collect();
        (Symbol { values }, defect)
    }

    /// A symbol with values in `module` whose first `k + 1` moments (at `w^0`
    /// in families) are the given classical values. `junk` seeds the free
    /// higher moments, so distinct seeds give independent lifts. With
    /// `approximate`, defects among the classical moments (which no choice of
    /// higher moments can repair) are left in place instead of failing.
    pub fn lift<R: DistCoeff>(
        &self,
        module: &DistModule<R>,
        classical: &Symbol<R>,
        junk: Option<u64>,
        approximate: bool,
    ) -> Result<Symbol<R>> {
        let k = module.weight.k() as usize;
        let nmom = module.nmom;
        let like = &module.like;
        let p = module.p;
        let naive = |c: usize| module.from_classical(&classical.values[c]);
        let cosets = self.inputs();
        let mut inputs: Vec<Vec<R>> = cosets
            .iter()
            .map(|&c| {
                let elliptic_order = if self.s[c] == c {
                    2
                } else if self.order3.contains(&c) {
                    3
                } else {
                    1
                };
                if elliptic_order > 1 && p % elliptic_order != 0 {
                    self.project(module, c, &naive(c))
                } else {
                    naive(c)
                }
            })
            .collect();
        if let Some(seed) = junk {
            let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
            for v in inputs.iter_mut().take(self.free.len()) {
                for x in v.iter_mut().skip(k + 1) {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    *x = x.add(&like.from_i64_like((state % 1000) as i64));
                }
            }
        }
        let (_, defect) = self.propagate(module, &inputs);
        // unknowns: coordinates of the inputs off the pinned classical block
        let ncoord = like.coords().len();
        let mut unknowns = Vec::new();
        for e in 0..inputs.len() {
            for m in 0..nmom {
                for i in 0..ncoord {
                    if !(m <= k && i == 0) {
                        unknowns.push((e, m, i));
                    }
                }
            }
        }
        // row (j, i) of a defect is meaningful modulo p^{M - j}: scale by p^j
        let width = nmom;
        let scale = |pos: usize, z: &Zp| z.mul_p_pow((pos % width) as u32);
        let zero_inputs: Vec<Vec<R>> = inputs.iter().map(|_| module.zero()).collect();
        let columns: Vec<Vec<Zp>> = unknowns
            .iter()
            .map(|&(e, m, i)| {
                let mut unit = zero_inputs.clone();
                let mut coords = vec![like.base().zero_like(); ncoord];
                coords[i] = like.base().one_like();
                unit[e][m] = R::from_coords(like, &coords);
                flatten(&self.propagate(module, &unit).1, &scale)
            })
            .collect();
        let rhs_all: Vec<Zp> = flatten(&defect, &scale).iter().map(|z| z.neg()).collect();
        let keep: Vec<usize> = (0..rhs_all.len())
            .filter(|&r| !approximate || columns.iter().any(|c| !c[r].vanishes()))
            .collect();
        let rhs: Vec<Zp> = keep.iter().map(|&r| rhs_all[r]).collect();
        let a: Vec<Vec<Zp>> = keep
            .iter()
            .map(|&r| columns.iter().map(|c| c[r]).collect())
            .collect();
        let y = solve_zp(a, rhs).ok_or_else(|| {
            Error::Precision(format!(
                "Manin relations not solvable at p = {p} with {nmom} moments"
            ))
        })?;
        for (&(e, m, i), yv) in unknowns.iter().zip(&y) {
            let mut coords = inputs[e][m].coords();
            coords[i] = coords[i].add(yv);
            inputs[e][m] = R::from_coords(like, &coords);
        }
        Ok(self.propagate(module, &inputs).0)
    }
}

fn flatten<R: DistCoeff>(v: &[R], scale: &dyn Fn(usize, &Zp) -> Zp) -> Vec<Zp> {
    v.iter()
        .enumerate()
        .flat_map(|(pos, x)| x.coords().into_iter().map(move |z| scale(pos, &z)))
        .collect()
}

/// Whether every Manin relation holds in the filtration quotient.
pub fn relations_hold<R: DistCoeff>(module: &DistModule<R>, manin: &Manin, s: &Symbol<R>) -> bool {
    let zero = module.zero();
    s.relation_defects(manin, module)
        .iter()
        .all(|d| module.eq_filtered(d, &zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistModule;

    #[test]
    fn plan_covers_small_levels() {
        for n in [11u64, 33, 55, 57, 77] {
            let m = Arc::new(Manin::new(n));
            let plan = LiftPlan::new(m.clone(), 5).unwrap();
            assert!(!plan.free.is_empty());
        }
        assert!(LiftPlan::new(Arc::new(Manin::new(22)), 2).is_err());
    }

    #[test]
    fn zero_lift_of_zero_is_zero() {
        let m = Arc::new(Manin::new(33));
        let plan = LiftPlan::new(m.clone(), 3).unwrap();
        let module = DistModule::single(3, 6, 0);
        let classical = Symbol {
            values: vec![vec![Zp::zero(3, 6)]; m.ncosets()],
        };
        let s = plan.lift(&module, &classical, None, false).unwrap();
        assert!(s.is_zero());
    }
}
