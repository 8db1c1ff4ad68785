//! The shipped library of small presheaves, maps and gluing diagrams.

use std::sync::Arc;

use crate::error::{DendroError, Result};
use crate::glue::GluingDiagram;
use crate::homotopy::{nerve_truncated, rep_cylinder, terminal_map, ThinOperad};
use crate::presheaf::{
    boundary, coproduct, rep_info, pullback, pullback_induced, pushout, quotient_by_twist, representable_arc, sub_presheaf,
    top_generator, yoneda, FinitePresheaf, PresheafMap,
};
use crate::site::omega::{automorphisms, face_with_image};
use crate::site::Shape;

pub enum Fixture {
    Presheaf(Arc<FinitePresheaf>),
    Map(PresheafMap),
    Diagram(Box<GluingDiagram>),
}

/// Names accepted by [`fixture`], with a one-line description.
pub const NAMES: &[(&str, &str)] = &[
    ("rep <shape>", "the representable presheaf on a tree"),
    ("boundary <shape>", "the boundary inclusion of a representable"),
    ("identity <shape>", "the identity fibration of a representable"),
    ("c2-quotient", "the quotient map from the 2-corolla representable by its twist"),
    ("e-nerve", "the truncated nerve of the groupoid with two isomorphic objects"),
    ("e-over-point", "the truncated groupoid nerve over the point"),
    ("interval-over-point", "the 1-simplex over the point"),
    ("two-points", "two colours over one colour"),
    ("cylinder-twist", "the cylinder on the 2-corolla with its ends identified by the twist"),
    ("cylinder-twist-collapsed", "the same, with the side of the cylinder collapsed to a point"),
    ("e-times-interval", "the product of the groupoid nerve and the 1-simplex, over the 1-simplex"),
    ("wedge-glue", "two copies of the previous fibration glued at a colour"),
    ("wedge-glue-points", "two identity fibrations on 1-simplices glued at a colour"),
];

fn shape_arg(name: &str, arg: Option<&str>) -> Result<Shape> {
    Shape::parse(arg.ok_or_else(|| DendroError::Unknown(format!("{name} needs a shape argument")))?)
}

/// The fixture called `name`; `arg` carries the shape for parametrized fixtures and
/// `d` the truncation degree for nerves.
pub fn fixture(name: &str, arg: Option<&str>, d: usize) -> Result<Fixture> {
    Ok(match name {
        "rep" => Fixture::Presheaf(representable_arc(&shape_arg(name, arg)?)),
        "boundary" => Fixture::Map(boundary(&shape_arg(name, arg)?)),
        "identity" => Fixture::Map(PresheafMap::identity(&representable_arc(&shape_arg(name, arg)?))),
        "c2-quotient" => Fixture::Map(c2_quotient()?),
        "e-nerve" => Fixture::Presheaf(e_nerve(d)?),
        "e-over-point" => Fixture::Map(terminal_map(&e_nerve(d)?)?),
        "interval-over-point" => Fixture::Map(terminal_map(&representable_arc(&Shape::linear(1)))?),
        "two-points" => Fixture::Map(two_points()?),
        "cylinder-twist" => Fixture::Presheaf(cylinder_twist(false)?),
        "cylinder-twist-collapsed" => Fixture::Presheaf(cylinder_twist(true)?),
        "e-times-interval" => Fixture::Map(e_times_interval(d)?.0),
        "wedge-glue" => Fixture::Diagram(Box::new(wedge_glue(d)?)),
        "wedge-glue-points" => Fixture::Diagram(Box::new(wedge_glue_points()?)),
        _ => return Err(DendroError::Unknown(format!("fixture {name}"))),
    })
}

/// `Ω[C_2] -> Ω[C_2]/τ`.
pub fn c2_quotient() -> Result<PresheafMap> {
    let c2 = Shape::corolla(2);
    let x = representable_arc(&c2);
    let tau = automorphisms(&c2)[1].clone();
    quotient_by_twist(&x, top_generator(&x), &tau, "C2/tau")
}

/// The nerve of `{0 ≅ 1}` with generators up to degree `d`.
pub fn e_nerve(d: usize) -> Result<Arc<FinitePresheaf>> {
    let r = nerve_truncated(&ThinOperad::indiscrete(2), d)?;
    Ok(Arc::new(FinitePresheaf::new(format!("E{d}"), r.presheaf.generators().to_vec())?))
}

pub fn two_points() -> Result<PresheafMap> {
    let pt = representable_arc(&Shape::eta());
    let (two, _, _) = coproduct(&pt, &pt, "two points")?;
    terminal_map(&two)
}

/// The pushout of `Cyl(Ω[C_2]) <- Ω[C_2] ⊔ Ω[C_2] -> Ω[C_2]` along the two ends
/// and `(id, τ)`. With `collapse`, the cylinder on the boundary is then sent to a point.
pub fn cylinder_twist(collapse: bool) -> Result<Arc<FinitePresheaf>> {
    let c2 = Shape::corolla(2);
    let rep = representable_arc(&c2);
    let cyl = rep_cylinder(&c2, 1);
    let (ends, _, _) = coproduct(&rep, &rep, "ends")?;
    let (e0, e1) = (cyl.end(&[false]), cyl.end(&[true]));
    let top = PresheafMap::new(ends.clone(), cyl.object.clone(), [e0.assignment(), e1.assignment()].concat())?;
    if !top.is_normal_mono()? {
        return Err(DendroError::Algorithm("ends of the cylinder are not a normal monomorphism".into()));
    }
    let tau = automorphisms(&c2)[1].clone();
    let info = rep_info(&c2);
    let twisted: Vec<_> = (0..rep.len()).map(|g| info.element(&tau.after(&info.morphism(&rep.gen_element(g))))).collect();
    let id: Vec<_> = (0..rep.len()).map(|g| rep.gen_element(g)).collect();
    let fold = PresheafMap::new(ends, rep.clone(), [id, twisted].concat())?;
    let po = pushout(&top, &fold, "J(x)C2")?;
    if !collapse {
        return Ok(po.object);
    }
    let side: Vec<usize> = (0..cyl.len())
        .filter(|&g| cyl.generator_value(g).0.generator() != top_generator(&rep))
        .map(|g| po.from_b.on_generator(g).generator())
        .collect();
    let sub = sub_presheaf(&po.object, side, "side")?;
    let pt = representable_arc(&Shape::eta());
    let to_pt = terminal_map(sub.source())?.with_target(pt);
    let collapsed = pushout(&sub, &to_pt, "J(x)C2/side")?;
    Ok(collapsed.object)
}

/// `E × Ω[L_1] -> Ω[L_1]`, with the inclusion of `E` over the source colour.
pub fn e_times_interval(d: usize) -> Result<(PresheafMap, PresheafMap)> {
    let e = e_nerve(d)?;
    let l1 = representable_arc(&Shape::linear(1));
    let (te, tl) = (terminal_map(&e)?, terminal_map(&l1)?);
    let pb = pullback(&te, &tl, &format!("{} x L1", e.name()), d + 1)?;
    let source = source_colour(&l1)?;
    let at_source = yoneda(&l1, &source).after(&terminal_map(&e)?.with_target(representable_arc(&Shape::eta())))?;
    let u = pullback_induced(&pb, &PresheafMap::identity(&e), &at_source)?;
    Ok((pb.to_y, u))
}

fn source_colour(l1: &Arc<FinitePresheaf>) -> Result<crate::presheaf::Element> {
    let d1 = face_with_image(&Shape::linear(1), &[1]).expect("vertex 0 of the 1-simplex");
    l1.act(&d1, &l1.gen_element(top_generator(l1)))
}

fn colour_leg() -> Result<PresheafMap> {
    let l1 = representable_arc(&Shape::linear(1));
    Ok(yoneda(&l1, &source_colour(&l1)?))
}

/// Two copies of `E × Ω[L_1] -> Ω[L_1]` glued along `E` over the source colour.
pub fn wedge_glue(d: usize) -> Result<GluingDiagram> {
    let (p1, u1) = e_times_interval(d)?;
    let p0 = terminal_map(&e_nerve(d)?)?.with_target(representable_arc(&Shape::eta()));
    let f = colour_leg()?;
    GluingDiagram::new(f.clone(), f, p0, p1.clone(), p1, u1.clone(), u1)
}

/// Two identity fibrations on `Ω[L_1]` glued at the source colour.
pub fn wedge_glue_points() -> Result<GluingDiagram> {
    let f = colour_leg()?;
    let p0 = PresheafMap::identity(f.source());
    let p1 = PresheafMap::identity(f.target());
    GluingDiagram::new(f.clone(), f.clone(), p0, p1.clone(), p1, f.clone(), f)
}
