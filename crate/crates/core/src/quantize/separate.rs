//! Splitting expressions into sums of products `c(x)·h(ξ)`.

use crate::symbolic::{Expr, Node, VarKind};

/// Upper bound on the number of products produced before giving up.
const MAX_PAIRS: usize = 4096;

/// Writes `e = Σ cᵢ(x)·hᵢ(ξ)` when the tree allows it. Returns `None` when
/// some node mixes `x` and `ξ` in a way that does not factor (for instance
/// `sin(x₁ξ₁)` or a non-integer power of a mixed product).
pub(crate) fn separate(e: &Expr) -> Option<Vec<(Expr, Expr)>> {
    let has_x = e.depends_on(VarKind::X);
    let has_xi = e.depends_on(VarKind::Xi);
    if !has_xi {
        return Some(vec![(e.clone(), Expr::one())]);
    }
    if !has_x {
        return Some(vec![(Expr::one(), e.clone())]);
    }
    let out = match e.node() {
        Node::Add(a, b) => {
            let mut l = separate(a)?;
            l.extend(separate(b)?);
            l
        }
        Node::Neg(a) => separate(a)?
            .into_iter()
            .map(|(c, h)| (c.neg_expr(), h))
            .collect(),
        Node::Mul(a, b) => {
            let (l, r) = (separate(a)?, separate(b)?);
            if l.len() * r.len() > MAX_PAIRS {
                return None;
            }
            let mut out = Vec::with_capacity(l.len() * r.len());
            for (c1, h1) in &l {
                for (c2, h2) in &r {
                    out.push((Expr::mul(c1, c2), Expr::mul(h1, h2)));
                }
            }
            out
        }
        Node::Div(a, b) => {
            let den = separate(b)?;
            if den.len() != 1 {
                return None;
            }
            let (dc, dh) = &den[0];
            separate(a)?
                .into_iter()
                .map(|(c, h)| (Expr::div(&c, dc), Expr::div(&h, dh)))
                .collect()
        }
        Node::Pow(a, p) if p.fract() == 0.0 => {
            let base = separate(a)?;
            if base.len() != 1 {
                return None;
            }
            let (c, h) = &base[0];
            vec![(c.powf(*p), h.powf(*p))]
        }
        _ => return None,
    };
    (out.len() <= MAX_PAIRS).then_some(out)
}
