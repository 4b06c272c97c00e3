use std::sync::Arc;

use rand::Rng;

use super::{K0Element, K0Group, Label};
use crate::error::{Error, Result};
use crate::groups::{linear_extension, GroupElement, GroupSpec, OrderSpec};
use crate::modcat::random::random_lt_idempotent;
use crate::modcat::{component_matrix, lt_functors, FreeSysModule, IdemObject, LtStructure, SysMorphism, WitnessMode};
use crate::rings::{RankRule, RingElem, Restriction, Subgroup, SystematicRing, Window};

/// How a generator degree is assigned to a slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotRule {
    /// The slot of `g` is `g`; slot modules live over `R₁`.
    Degree,
    /// For `G = N ⋊ H`, the slot of `(n, h)` is `n`; slot modules live over `R^H`.
    NormalPart,
    /// For an extension, the slot of `g` is `π(g) ∈ H`; slot modules live over `R_N`.
    Quotient,
}

/// A finite window of slots over a positively supported ring, with the
/// data needed to classify its idempotents.
#[derive(Clone, Debug)]
pub struct KWindow {
    ring: Arc<SystematicRing>,
    rule: SlotRule,
    order: OrderSpec,
    /// Larger slots first.
    slots: Vec<GroupElement>,
    slot_ring: Arc<Restriction>,
    window: Window,
}

impl KWindow {
    /// Slots are degrees of a lattice-graded ring.
    pub fn template(ring: Arc<SystematicRing>, order: OrderSpec, slots: &[GroupElement], window: Window) -> Result<Self> {
        let rank = match ring.group() {
            GroupSpec::FreeAbelian { rank } => *rank,
            other => return Err(Error::SpecMismatch(format!("degree slots need a lattice, got {}", other.describe()))),
        };
        if order.rank() != rank {
            return Err(Error::InvalidSpec("order rank differs from group rank".into()));
        }
        let slot_ring = ring.subring_over_subgroup(&Subgroup::Sublattice(Vec::new()))?;
        Self::build(ring, SlotRule::Degree, order, slots, slot_ring, window)
    }

    /// Slots are `N`-parts over `N ⋊ H`; `order` lives on `N`.
    pub fn semidirect(ring: Arc<SystematicRing>, order: OrderSpec, slots: &[GroupElement], window: Window) -> Result<Self> {
        let GroupSpec::Semidirect { n, .. } = ring.group() else {
            return Err(Error::SpecMismatch("N-part slots need a semidirect product".into()));
        };
        if order.rank() != n.lattice_part(&n.identity()).len() {
            return Err(Error::InvalidSpec("order rank differs from the rank of N".into()));
        }
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        order.check_h_invariance(ring.group(), &mut rng, 64)?;
        let slot_ring = ring.subring_over_subgroup(&Subgroup::Complement)?;
        Self::build(ring, SlotRule::NormalPart, order, slots, slot_ring, window)
    }

    /// Slots are cosets `h ∈ H = G/N`; `order` lives on `H`.
    pub fn quotient(ring: Arc<SystematicRing>, order: OrderSpec, cosets: &[GroupElement], window: Window) -> Result<Self> {
        let GroupSpec::Extension(e) = ring.group() else {
            return Err(Error::SpecMismatch("coset slots need a lattice extension".into()));
        };
        if order.rank() != e.h_rank() {
            return Err(Error::InvalidSpec("order rank differs from the rank of H".into()));
        }
        let slot_ring = ring.subring_over_subgroup(&Subgroup::kernel_of(ring.group())?)?;
        Self::build(ring, SlotRule::Quotient, order, cosets, slot_ring, window)
    }

    fn build(
        ring: Arc<SystematicRing>,
        rule: SlotRule,
        order: OrderSpec,
        slots: &[GroupElement],
        slot_ring: Restriction,
        window: Window,
    ) -> Result<Self> {
        let slots = linear_extension(&order, slots)?;
        let w = KWindow { ring, rule, order, slots, slot_ring: Arc::new(slot_ring), window };
        w.check_slot_ring()?;
        w.check_support()?;
        Ok(w)
    }

    pub fn ring(&self) -> &Arc<SystematicRing> {
        &self.ring
    }

    pub fn rule(&self) -> SlotRule {
        self.rule
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn slots(&self) -> &[GroupElement] {
        &self.slots
    }

    pub fn slot_ring(&self) -> &Restriction {
        &self.slot_ring
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// The same context restricted or enlarged to other slots.
    pub fn with_slots(&self, slots: &[GroupElement]) -> Result<Self> {
        let slot_ring = (*self.slot_ring).clone();
        Self::build(self.ring.clone(), self.rule, self.order.clone(), slots, slot_ring, self.window)
    }

    pub fn label(&self, slot: &GroupElement) -> Label {
        match self.rule {
            SlotRule::Degree | SlotRule::NormalPart => Label::Degree(slot.clone()),
            SlotRule::Quotient => Label::Coset(slot.clone()),
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        self.slots.iter().map(|s| self.label(s)).collect()
    }

    /// The slot a generator degree belongs to.
    pub fn slot_of(&self, g: &GroupElement) -> Result<GroupElement> {
        let group = self.ring.group();
        match (self.rule, group) {
            (SlotRule::Degree, _) => Ok(g.clone()),
            (SlotRule::NormalPart, _) => {
                g.parts().map(|(n, _)| n.clone()).ok_or_else(|| Error::SpecMismatch(format!("{g} is not a pair")))
            }
            (SlotRule::Quotient, GroupSpec::Extension(e)) => e.project(g),
            _ => unreachable!("checked on construction"),
        }
    }

    /// The degree `c` whose component computes the slot class: `s`,
    /// `(s, 1)` or `σ(h)`.
    pub fn reference(&self, slot: &GroupElement) -> Result<GroupElement> {
        match (self.rule, self.ring.group()) {
            (SlotRule::Degree, _) => Ok(slot.clone()),
            (SlotRule::NormalPart, GroupSpec::Semidirect { h, .. }) => Ok(GroupElement::pair(slot.clone(), h.identity())),
            (SlotRule::Quotient, GroupSpec::Extension(e)) => e.section(slot),
            _ => unreachable!("checked on construction"),
        }
    }

    /// The degrees of slot modules, relative to the reference degree, that
    /// the support checks and random objects draw from.
    pub fn probe_offsets(&self) -> Vec<GroupElement> {
        let sub = self.slot_ring.ring.group();
        let raw = match sub.elements() {
            Some(all) => all,
            None => {
                let k = sub.lattice_part(&sub.identity()).len();
                (0..3usize.pow(k as u32))
                    .map(|mut idx| {
                        GroupElement::free((0..k).map(|_| {
                            let v = (idx % 3) as i64 - 1;
                            idx /= 3;
                            v
                        }))
                    })
                    .collect()
            }
        };
        raw.iter().map(|k| self.slot_ring.embed_degree(k).expect("subgroup element")).collect()
    }

    fn check_slot_ring(&self) -> Result<()> {
        let base = self.ring.base();
        if base.rank_rule() == RankRule::None {
            return Err(Error::UnclassifiableSlot(format!("no rank rule for projectives over {base}")));
        }
        let e = self.ring.group().identity();
        if self.ring.gens(&e, &self.window)? != vec![self.ring.one()] {
            return Err(Error::UnclassifiableSlot("the identity component is larger than the base".into()));
        }
        let sub = &self.slot_ring.ring;
        let g = sub.group();
        let gens: Vec<GroupElement> = match g.elements() {
            Some(all) => all,
            None => {
                let k = g.lattice_part(&g.identity()).len();
                (0..k)
                    .flat_map(|i| {
                        [1i64, -1].map(|sgn| GroupElement::free((0..k).map(|j| if i == j { sgn } else { 0 })))
                    })
                    .collect()
            }
        };
        for x in gens {
            if !sub.is_strongly_systematic_at(&x, &self.window)? {
                return Err(Error::NotStronglySystematic(format!("{x} in the slot ring")));
            }
        }
        Ok(())
    }

    /// Homs between different slots may only go from larger to smaller.
    fn check_support(&self) -> Result<()> {
        let group = self.ring.group();
        let offsets = self.probe_offsets();
        for (i, a) in self.slots.iter().enumerate() {
            for b in &self.slots[i + 1..] {
                for (src, tgt) in [(a, b), (b, a)] {
                    if self.order.leq(tgt, src)? {
                        continue;
                    }
                    let cs = self.reference(src)?;
                    let ct = self.reference(tgt)?;
                    for x in &offsets {
                        for y in &offsets {
                            let gs = group.compose(&cs, x)?;
                            let gt = group.compose(&ct, y)?;
                            let hom = self.ring.gens(&group.left_divide(&gt, &gs)?, &self.window)?;
                            if !hom.is_empty() {
                                return Err(Error::SupportViolation(format!(
                                    "nonzero homs from ⟨{gs}⟩ to ⟨{gt}⟩ although slot {src} is not above {tgt}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Reorders the generators of `x` so that slots appear larger first, and
    /// returns the slot of each block.
    pub fn arrange(&self, x: &IdemObject) -> Result<(IdemObject, LtStructure, Vec<GroupElement>)> {
        let a = x.carrier();
        let slots_of: Vec<GroupElement> = a.degrees().iter().map(|g| self.slot_of(g)).collect::<Result<_>>()?;
        for s in &slots_of {
            if !self.slots.contains(s) {
                return Err(Error::InvalidSpec(format!("degree in slot {s} lies outside the window")));
            }
        }
        let pos = |s: &GroupElement| self.slots.iter().position(|t| t == s).expect("checked");
        let mut perm: Vec<usize> = (0..a.rank()).collect();
        perm.sort_by_key(|&i| pos(&slots_of[i]));
        let degrees: Vec<GroupElement> = perm.iter().map(|&i| a.degrees()[i].clone()).collect();
        let module = FreeSysModule::new(a.ring_arc().clone(), degrees)?;
        let p = x.idempotent().matrix();
        let m = crate::rings::Matrix::from_fn(a.rank(), a.rank(), |i, j| p.get(perm[i], perm[j]).clone());
        let arranged = IdemObject::new(SysMorphism::new(module.clone(), module, m)?)?;
        let mut sizes = Vec::new();
        let mut block_slots: Vec<GroupElement> = Vec::new();
        for &i in &perm {
            let s = &slots_of[i];
            if block_slots.last() == Some(s) {
                *sizes.last_mut().unwrap() += 1;
            } else {
                block_slots.push(s.clone());
                sizes.push(1);
            }
        }
        let lt = LtStructure::new(sizes);
        lt.check(&lt, arranged.idempotent()).map_err(|e| match e {
            Error::NotLowerTriangular { row_block, col_block } => Error::SupportViolation(format!(
                "entry from slot {} to slot {}",
                block_slots[col_block - 1],
                block_slots[row_block - 1]
            )),
            other => other,
        })?;
        Ok((arranged, lt, block_slots))
    }

    /// The base-ring rank of `T_k(x)` read on the degree-`c` component.
    fn block_rank(&self, block: &IdemObject, slot: &GroupElement) -> Result<i64> {
        let c = self.reference(slot)?;
        let m = component_matrix(block.idempotent(), &c, &self.window)?;
        let base = self.ring.base();
        base.idempotent_rank(&m)
            .map(|r| r as i64)
            .ok_or_else(|| Error::UnclassifiableSlot(format!("no rank rule for projectives over {base}")))
    }

    /// The diagonal blocks `T_k(x)` with their slots.
    pub fn slot_blocks(&self, x: &IdemObject) -> Result<Vec<(GroupElement, IdemObject)>> {
        let (arranged, lt, slots) = self.arrange(x)?;
        (0..lt.blocks()).map(|k| Ok((slots[k].clone(), lt_functors(&arranged, &lt, k)?))).collect()
    }

    /// A slot block moved to the slot ring: degrees `c⁻¹ g` pulled back to
    /// the subgroup, entries restricted.
    pub fn to_slot_ring(&self, slot: &GroupElement, block: &IdemObject) -> Result<IdemObject> {
        let group = self.ring.group();
        let c = self.reference(slot)?;
        let sub = Arc::new(self.slot_ring.ring.clone());
        let degrees = block
            .carrier()
            .degrees()
            .iter()
            .map(|g| {
                let rel = group.left_divide(&c, g)?;
                self.slot_ring
                    .pull_degree(&rel)
                    .ok_or_else(|| Error::InvalidElement(format!("{rel} is not in the slot subgroup")))
            })
            .collect::<Result<Vec<_>>>()?;
        let module = FreeSysModule::new(sub.clone(), degrees)?;
        let p = block.idempotent().matrix();
        let mut entries = Vec::with_capacity(p.rows() * p.cols());
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                entries.push(self.restrict(&sub, p.get(i, j))?);
            }
        }
        let n = module.rank();
        let m = crate::rings::Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
        IdemObject::new(SysMorphism::new(module.clone(), module, m)?)
    }

    fn restrict(&self, sub: &SystematicRing, x: &RingElem) -> Result<RingElem> {
        match x {
            // Z[1/s] restricted to its degree-zero part is Z
            RingElem::Fraction(c) if sub.localization().is_none() => {
                if !c.is_integer() {
                    return Err(Error::InvalidElement(format!("{x} is not in the slot ring")));
                }
                Ok(sub.scalar(*c))
            }
            _ => self.slot_ring.restrict(x),
        }
    }

    /// The class of a slot-ring object: the base rank of its identity component.
    pub fn slot_ring_class(&self, y: &IdemObject) -> Result<i64> {
        let sub = &self.slot_ring.ring;
        let m = component_matrix(y.idempotent(), &sub.group().identity(), &self.window)?;
        sub.base()
            .idempotent_rank(&m)
            .map(|r| r as i64)
            .ok_or_else(|| Error::UnclassifiableSlot(format!("no rank rule over {}", sub.base())))
    }
}

/// `K0` of the window: free abelian on the slot labels, each slot carrying
/// `K0(R₁) = ℤ`.
pub fn k0_of_window(ctx: &KWindow) -> K0Group {
    K0Group::free(ctx.labels())
}

/// `[X] = Σ_k rank(T_k X) · [slot_k]`.
pub fn k0_class(x: &IdemObject, ctx: &KWindow) -> Result<K0Element> {
    let mut out = K0Element::zero();
    for (slot, block) in ctx.slot_blocks(x)? {
        out.add_term(ctx.label(&slot), ctx.block_rank(&block, &slot)?);
    }
    Ok(out)
}

/// A random lower triangular idempotent over the window, with between one
/// and `max_per_slot` generators in each slot it uses.
pub fn random_window_object<R: Rng + ?Sized>(
    ctx: &KWindow,
    max_per_slot: usize,
    mode: WitnessMode,
    rng: &mut R,
) -> Result<(IdemObject, LtStructure)> {
    let group = ctx.ring.group();
    let offsets = ctx.probe_offsets();
    let mut blocks = Vec::new();
    for s in &ctx.slots {
        if ctx.slots.len() > 1 && rng.gen_bool(0.2) {
            continue;
        }
        let c = ctx.reference(s)?;
        let n = rng.gen_range(1..=max_per_slot);
        let block: Vec<GroupElement> = (0..n)
            .map(|_| group.compose(&c, &offsets[rng.gen_range(0..offsets.len())]))
            .collect::<Result<_>>()?;
        blocks.push(block);
    }
    random_lt_idempotent(&ctx.ring, &blocks, mode, rng, &ctx.window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Action;
    use crate::modcat::{epsilon, split_lt_recursive, IdemObject};
    use crate::rings::{Base, Matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(k: i64) -> GroupElement {
        GroupElement::free([k])
    }

    fn f2t() -> Arc<SystematicRing> {
        Arc::new(SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap())
    }

    fn template(ring: Arc<SystematicRing>, slots: &[i64]) -> KWindow {
        let s: Vec<GroupElement> = slots.iter().map(|&k| z(k)).collect();
        KWindow::template(ring, OrderSpec::orthant(1), &s, Window::default()).unwrap()
    }

    #[test]
    fn window_of_polynomials() {
        let ctx = template(f2t(), &[0, 1, 2]);
        let g = k0_of_window(&ctx);
        assert!(g.is_free_of_rank(3));
        assert_eq!(ctx.slots(), &[z(2), z(1), z(0)]);
        let single = template(f2t(), &[5]);
        assert!(k0_of_window(&single).is_free_of_rank(1));
    }

    #[test]
    fn free_shift_and_projection_classes() {
        let r = f2t();
        let ctx = template(r.clone(), &[0, 1]);
        let a = FreeSysModule::new(r.clone(), vec![z(1)]).unwrap();
        assert_eq!(k0_class(&IdemObject::free(&a), &ctx).unwrap(), K0Element::basis(Label::Degree(z(1))));
        let b = FreeSysModule::new(r.clone(), vec![z(0), z(1)]).unwrap();
        let p = Matrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { r.one() } else { r.zero() });
        let x = IdemObject::new(SysMorphism::new(b.clone(), b, p).unwrap()).unwrap();
        assert_eq!(k0_class(&x, &ctx).unwrap(), K0Element::basis(Label::Degree(z(0))));
        let xx = x.direct_sum(&x);
        assert_eq!(k0_class(&xx, &ctx).unwrap(), k0_class(&x, &ctx).unwrap().scale(2));
        let empty = IdemObject::free(&FreeSysModule::zero(r));
        assert!(k0_class(&empty, &ctx).unwrap().is_zero());
    }

    #[test]
    fn out_of_window_and_unclassifiable() {
        let ctx = template(f2t(), &[0, 1]);
        let a = FreeSysModule::new(ctx.ring().clone(), vec![z(3)]).unwrap();
        assert!(k0_class(&IdemObject::free(&a), &ctx).is_err());
        let r6 = Arc::new(SystematicRing::monoid_ring(Base::Mod(6), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap());
        let e = KWindow::template(r6, OrderSpec::orthant(1), &[z(0)], Window::default()).unwrap_err();
        assert!(matches!(e, Error::UnclassifiableSlot(_)));
    }

    #[test]
    fn support_violation_is_detected() {
        let laurent = Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)));
        let e = KWindow::template(laurent, OrderSpec::orthant(1), &[z(0), z(1)], Window::default()).unwrap_err();
        assert!(matches!(e, Error::SupportViolation(_)));
        let graded = Arc::new(SystematicRing::power_localization(2).unwrap());
        assert!(KWindow::template(graded, OrderSpec::orthant(1), &[z(0), z(1)], Window::default()).is_err());
    }

    #[test]
    fn classes_are_additive_and_respect_splitting() {
        let ctx = template(f2t(), &[0, 1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let (x, lt) = random_window_object(&ctx, 2, WitnessMode::General, &mut rng).unwrap();
            let (y, _) = random_window_object(&ctx, 2, WitnessMode::General, &mut rng).unwrap();
            let cx = k0_class(&x, &ctx).unwrap();
            let cy = k0_class(&y, &ctx).unwrap();
            assert_eq!(k0_class(&x.direct_sum(&y), &ctx).unwrap(), cx.add(&cy));
            // T_k followed by the diagonal embeddings gives back the class
            let pieces = split_lt_recursive(&x, &lt).unwrap();
            let mut total = K0Element::zero();
            for (k, piece) in pieces.iter().enumerate() {
                let (e, _) = epsilon(piece, k, pieces.len()).unwrap();
                total = total.add(&k0_class(&e, &ctx).unwrap());
            }
            assert_eq!(total, cx);
            // naturality in the window
            let bigger = ctx.with_slots(&[z(0), z(1), z(2), z(3), z(4)]).unwrap();
            assert_eq!(k0_class(&x, &bigger).unwrap(), cx);
        }
    }

    #[test]
    fn skew_slots_use_the_complement_ring() {
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Swap).unwrap();
        let r = Arc::new(SystematicRing::skew_group_ring(Base::Mod(2), g, vec![vec![1, 0], vec![0, 1]]).unwrap());
        let slots: Vec<GroupElement> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|v| GroupElement::free(*v)).collect();
        let ctx = KWindow::semidirect(r.clone(), OrderSpec::orthant(2), &slots, Window::default()).unwrap();
        assert!(k0_of_window(&ctx).is_free_of_rank(4));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (x, _) = random_window_object(&ctx, 2, WitnessMode::General, &mut rng).unwrap();
            let c = k0_class(&x, &ctx).unwrap();
            for (slot, block) in ctx.slot_blocks(&x).unwrap() {
                let y = ctx.to_slot_ring(&slot, &block).unwrap();
                assert_eq!(ctx.slot_ring_class(&y).unwrap(), c.coefficient(&ctx.label(&slot)));
            }
        }
    }
}
