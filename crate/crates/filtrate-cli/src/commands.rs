use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use itertools::Itertools;
use serde_json::{json, Value};

use filtrate::anodyne::{self, classify_sd_horn, ClassLabel};
use filtrate::fsset;
use filtrate::homotopy::{self, spi0 as compute_spi0};
use filtrate::ih::{self, ComplexJson, Perversity};
use filtrate::io::{self, fmap_to_json, fsset_to_json, fsset_to_text, presentation_to_text, PosetJson};
use filtrate::standard::default_partner;
use filtrate::subdivision::{last_vertex_filtered, sd};
use filtrate::{hom, models, FSSet};

use crate::{load, HornArgs, Settings};

pub struct Output {
    pub text: String,
    pub status: u8,
}

fn emit(s: &Settings, text: String, value: Value) -> Result<Output> {
    let text = if s.json { format!("{}\n", serde_json::to_string_pretty(&value)?) } else { text };
    Ok(Output { text, status: 0 })
}

fn header(out: &mut String, items: &[(&str, String)]) {
    let _ = writeln!(out, "# {}", items.iter().map(|(k, v)| format!("{k}={v}")).join(" "));
}

fn settings_json(items: &[(&str, String)]) -> Value {
    Value::Object(items.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn counts_line(x: &FSSet) -> String {
    x.nd_counts().iter().map(|c| c.to_string()).join(" ")
}

fn object_text(x: &FSSet) -> Result<(String, Value)> {
    Ok((fsset_to_text(x)?, serde_json::to_value(fsset_to_json(x))?))
}

pub fn info(s: &Settings, spec: &str, show: bool) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    if show {
        let (text, value) = object_text(&x)?;
        return emit(s, text, value);
    }
    let report = fsset::validate(&x);
    let mut profile: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..x.len() {
        *profile.entry(x.poset().fmt_chain(x.filt(i))).or_default() += 1;
    }
    let (_, components) = x.components();
    let mut t = String::new();
    let _ = writeln!(t, "poset: {}", x.poset().names().join(" "));
    let _ = writeln!(t, "nd counts by dimension: {}", counts_line(&x));
    let _ = writeln!(t, "components: {components}");
    let _ = writeln!(t, "simplices by filtration:");
    for (c, n) in &profile {
        let _ = writeln!(t, "  {c} {n}");
    }
    let _ = writeln!(t, "validation: {}", if report.is_clean() { "clean".to_string() } else { format!("{} issues", report.issues.len()) });
    emit(
        s,
        t,
        json!({
            "poset": PosetJson::of(x.poset()),
            "nd_counts": x.nd_counts(),
            "components": components,
            "by_filtration": profile,
            "valid": report.is_clean(),
            "issues": report.issues.len(),
        }),
    )
}

pub fn validate(s: &Settings, spec: &str) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let report = fsset::validate(&x);
    let issues: Vec<Value> = report.issues.iter().map(|i| json!({"identity": i.identity, "witness": i.witness})).collect();
    let mut out = emit(s, report.to_string(), json!({"valid": report.is_clean(), "issues": issues}))?;
    if !report.is_clean() {
        out.status = 1;
    }
    Ok(out)
}

pub fn subdivide(s: &Settings, spec: &str, show: bool) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let sx = sd(&x)?;
    let (text, value) = object_text(&sx.set)?;
    if show {
        return emit(s, text, value);
    }
    let t = format!("input nd counts: {}\nsubdivision nd counts: {}\n", counts_line(&x), counts_line(&sx.set));
    emit(s, t, json!({"input": x.nd_counts(), "subdivision": sx.set.nd_counts()}))
}

pub fn lastvertex(s: &Settings, spec: &str) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let sx = sd(&x)?;
    let f = last_vertex_filtered(&x, &sx);
    let mut t = String::new();
    for i in 0..sx.set.len() {
        let _ = writeln!(t, "{} -> {}", sx.set.name(i), x.fmt_nf(f.images[i]));
    }
    emit(s, t, serde_json::to_value(fmap_to_json(&sx.set, &x, &f))?)
}

fn horn_setup(s: &Settings, h: &HornArgs) -> Result<anodyne::Classification> {
    let p = load::poset(s.poset.as_deref())?;
    let phi = load::chain(&p, &h.chain)?;
    let kp = match h.kp {
        Some(kp) => kp,
        None => default_partner(&phi, h.k)?,
    };
    Ok(classify_sd_horn(p, &phi, h.k, kp)?)
}

pub fn classify_horn(s: &Settings, h: &HornArgs, list: bool) -> Result<Output> {
    let c = horn_setup(s, h)?;
    let counts = c.counts();
    let mut t = String::new();
    header(&mut t, &[("chain", h.chain.clone()), ("k", h.k.to_string()), ("kp", c.spec.kp.to_string())]);
    for l in ClassLabel::ALL {
        let _ = writeln!(t, "{l} {}", counts[&l]);
    }
    let names = anodyne::labels_by_name(&c);
    let rho = anodyne::rho_by_name(&c);
    if list {
        for i in 0..c.sd.set.len() {
            let n = c.sd.set.name(i);
            let partner = rho.get(n).map(|r| format!(" -> {r}")).unwrap_or_default();
            let _ = writeln!(t, "{n} {}{partner}", c.labels[i]);
        }
    }
    let counts_json: BTreeMap<String, usize> = counts.iter().map(|(l, n)| (l.to_string(), *n)).collect();
    let mut value = json!({"chain": h.chain, "k": h.k, "kp": c.spec.kp, "counts": counts_json});
    if list {
        value["labels"] = serde_json::to_value(&names)?;
        value["rho"] = serde_json::to_value(&rho)?;
    }
    emit(s, t, value)
}

pub fn present_anodyne(s: &Settings, h: &HornArgs) -> Result<Output> {
    let c = horn_setup(s, h)?;
    let pres = anodyne::build_presentation(&c)?;
    let mut t = String::new();
    header(&mut t, &[("chain", h.chain.clone()), ("k", h.k.to_string()), ("kp", c.spec.kp.to_string())]);
    let _ = writeln!(t, "# stages {} fills {}", pres.stages.len(), pres.total_fills());
    t.push_str(&presentation_to_text(&pres)?);
    emit(s, t, serde_json::to_value(&pres)?)
}

pub fn verify_presentation(
    s: &Settings,
    certificate: &str,
    horn: Option<HornArgs>,
    general: Option<(String, String, String)>,
) -> Result<Output> {
    let text = load::read(certificate)?;
    let pres = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(filtrate::Error::from)?
    } else {
        io::parse_presentation_text(&text)?
    };
    let (x, y, incl) = match (horn, general) {
        (Some(h), None) => anodyne::horn_objects(&horn_setup(s, &h)?)?,
        (None, Some((a, b, m))) => {
            let p = load::poset(s.poset.as_deref())?;
            let (x, y) = load::pair(&a, &b, &p)?;
            let incl = load::map(&m, &x, &y)?;
            (x, y, incl)
        }
        _ => bail!(filtrate::Error::Parse("give either --chain/--k or --source/--target/--inclusion".into())),
    };
    let v = anodyne::verify_presentation(&x, &y, &incl, &pres);
    let mut t = format!("{}\n", if v.ok { "accepted" } else { "rejected" });
    for d in &v.diagnostics {
        let _ = writeln!(t, "  {d}");
    }
    let mut out = emit(s, t, serde_json::to_value(&v)?)?;
    if !v.ok {
        out.status = 1;
    }
    Ok(out)
}

pub fn ex(s: &Settings, spec: &str, stage: usize, cap: usize, show: bool) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let tower = filtrate::ex::ex_iter(&x, stage, cap, s.budget)?;
    let last = tower.stages.last().expect("stage 0");
    if show {
        let (text, value) = object_text(last)?;
        return emit(s, text, value);
    }
    let items = [("budget", s.budget.to_string()), ("dim-cap", cap.to_string()), ("ex-stage", stage.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    for (i, st) in tower.stages.iter().enumerate() {
        let _ = writeln!(t, "stage {i}: {}", counts_line(st));
    }
    let stages: Vec<Vec<usize>> = tower.stages.iter().map(|st| st.nd_counts()).collect();
    emit(s, t, json!({"settings": settings_json(&items), "nd_counts": stages}))
}

pub fn enum_maps(s: &Settings, a: &str, x: &str, list: bool) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let (a, x) = load::pair(a, x, &p)?;
    let maps = hom::enum_fmaps(&a, &x, s.budget)?;
    let items = [("budget", s.budget.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    let _ = writeln!(t, "maps: {}", maps.len());
    if list {
        for (k, f) in maps.iter().enumerate() {
            let _ = writeln!(t, "{k}: {}", (0..a.len()).map(|i| format!("{}->{}", a.name(i), x.fmt_nf(f.images[i]))).join(" "));
        }
    }
    let mut value = json!({"settings": settings_json(&items), "count": maps.len()});
    if list {
        value["maps"] = serde_json::to_value(maps.iter().map(|f| fmap_to_json(&a, &x, f)).collect::<Vec<_>>())?;
    }
    emit(s, t, value)
}

pub fn map_space(s: &Settings, a: &str, x: &str, cap: usize) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let (a, x) = load::pair(a, x, &p)?;
    let m = homotopy::map_space(&a, &x, cap, s.budget)?;
    let (_, comps) = m.set.components();
    let items = [("budget", s.budget.to_string()), ("dim-cap", cap.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    let _ = writeln!(t, "simplices by dimension: {}", m.level_sizes().iter().join(" "));
    let _ = writeln!(t, "non-degenerate: {}", counts_line(&m.set));
    let _ = writeln!(t, "components: {comps}");
    emit(
        s,
        t,
        json!({"settings": settings_json(&items), "levels": m.level_sizes(), "nd_counts": m.set.nd_counts(), "components": comps}),
    )
}

pub fn spi0(s: &Settings, spec: &str) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let d = compute_spi0(&x, s.budget)?;
    let items = [("budget", s.budget.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    for (o, n) in d.objects.iter().zip(&d.class_counts) {
        let _ = writeln!(t, "{o} {n}");
    }
    for r in &d.restrictions {
        let _ = writeln!(t, "{} -> {}", r.from, r.to);
        for row in d.matrix(r) {
            let _ = writeln!(t, "  {}", row.iter().join(" "));
        }
    }
    let mut value = serde_json::to_value(&d)?;
    value["settings"] = settings_json(&items);
    emit(s, t, value)
}

fn group_line(g: &filtrate::snf::Group) -> String {
    g.to_string()
}

pub fn spi1(s: &Settings, spec: &str, chain: &str, base: usize, stage: usize, cap: usize) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let phi = load::chain(x.poset(), chain)?;
    let r = homotopy::spi1_presentation(&x, &phi, base, stage, cap, s.budget)?;
    let items = [("budget", s.budget.to_string()), ("dim-cap", cap.to_string()), ("ex-stage", stage.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    let _ = writeln!(t, "# stage-{stage} approximation");
    let _ = writeln!(t, "chain: {}", r.chain);
    let _ = writeln!(t, "base: {}", r.base);
    let _ = writeln!(t, "simplices by dimension: {}", r.level_sizes.iter().join(" "));
    let _ = writeln!(t, "generators: {}", r.presentation.generators.len());
    for rel in &r.presentation.relators {
        let _ = writeln!(t, "  {}", r.presentation.fmt_relator(rel));
    }
    let _ = writeln!(t, "abelianization: {}", group_line(&r.abelianization));
    let mut value = serde_json::to_value(&r)?;
    value["settings"] = settings_json(&items);
    value["label"] = json!(format!("stage-{stage} approximation"));
    emit(s, t, value)
}

pub fn holink(s: &Settings, spec: &str, p_name: &str, q_name: &str, stage: usize, cap: usize) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let pi = x.poset().index(p_name)?;
    let qi = x.poset().index(q_name)?;
    let r = homotopy::holink_restriction(&x, pi, qi, stage, cap, s.budget)?;
    let items = [("budget", s.budget.to_string()), ("dim-cap", cap.to_string()), ("ex-stage", stage.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    let _ = writeln!(t, "# stage-{stage} approximation");
    let _ = writeln!(t, "pair: {}", r.pair);
    let _ = writeln!(t, "holink simplices by dimension: {}", r.holink_levels.iter().join(" "));
    let _ = writeln!(t, "stratum simplices by dimension: {}", r.stratum_levels.iter().join(" "));
    let _ = writeln!(t, "holink group: {}", group_line(&r.holink_group));
    let _ = writeln!(t, "stratum group: {}", group_line(&r.stratum_group));
    let _ = writeln!(t, "restriction:");
    for row in &r.image {
        let _ = writeln!(t, "  {}", row.iter().join(" "));
    }
    let _ = writeln!(t, "cokernel: {}", group_line(&r.cokernel));
    let _ = writeln!(t, "index: {}", r.index().map_or("infinite".to_string(), |i| i.to_string()));
    let mut value = serde_json::to_value(&r)?;
    value["settings"] = settings_json(&items);
    value["index"] = json!(r.index());
    emit(s, t, value)
}

pub fn refine(s: &Settings, spec: &str, show: bool) -> Result<Output> {
    let p = load::poset(s.poset.as_deref())?;
    let x = load::object(spec, &p)?;
    let r = homotopy::refine_stratification(&x, s.budget)?;
    if show {
        let (text, value) = object_text(&r.set)?;
        return emit(s, text, value);
    }
    let items = [("budget", s.budget.to_string())];
    let mut t = String::new();
    header(&mut t, &items);
    let _ = writeln!(t, "refined poset:");
    for line in r.poset.to_text().lines() {
        let _ = writeln!(t, "  {line}");
    }
    let _ = writeln!(t, "stratum components:");
    for (i, c) in r.stratum_components.iter().enumerate() {
        let _ = writeln!(t, "  {} {c}", r.poset.name(i));
    }
    let comps: BTreeMap<String, usize> = r.stratum_components.iter().enumerate().map(|(i, c)| (r.poset.name(i).to_string(), *c)).collect();
    emit(s, t, json!({"settings": settings_json(&items), "poset": PosetJson::of(&r.poset), "stratum_components": comps}))
}

pub fn ih(
    s: &Settings,
    spec: &str,
    perversity: Option<&str>,
    uniform: Option<i64>,
    ordinary: bool,
    cover_vertex: Option<&str>,
) -> Result<Output> {
    let x = load::complex(spec)?;
    let p = match (perversity, uniform) {
        (Some(f), _) => load::perversity(&x, f)?,
        (None, Some(v)) => Perversity::from_fn(&x, |_| v),
        (None, None) => Perversity::zero(&x),
    };
    let h = ih::intersection_homology(&x, &p)?;
    let strata = x.strata();
    let mut t = String::new();
    let _ = writeln!(t, "formal dimension: {}", x.formal_dim());
    let _ = writeln!(t, "strata:");
    for (st, v) in strata.iter().zip(&p.values) {
        let _ = writeln!(t, "  {} dim {} codim {} perversity {v}", st.name, st.dim, st.codim);
    }
    for w in p.warnings(&x) {
        let _ = writeln!(t, "warning: {w}");
    }
    let _ = writeln!(t, "degree rank torsion group");
    for (k, g) in h.groups.iter().enumerate() {
        let torsion = if g.torsion.is_empty() { "-".to_string() } else { g.torsion.iter().join(",") };
        let _ = writeln!(t, "{k} {} {torsion} {g}", g.rank);
    }
    let mut value = json!({
        "complex": ComplexJson::of(&x),
        "strata": strata,
        "perversity": p.to_map(&x),
        "warnings": p.warnings(&x),
        "homology": h,
    });
    if ordinary {
        let o = ih::ordinary_homology(&x)?;
        let _ = writeln!(t, "ordinary: {}", o.groups.iter().join(" | "));
        value["ordinary"] = serde_json::to_value(&o)?;
    }
    if let Some(v) = cover_vertex {
        let c = x.vertex(v).with_context(|| format!("no vertex `{v}`"))?;
        let (u, w): (Vec<Vec<usize>>, Vec<Vec<usize>>) = x.maximal().iter().cloned().partition(|m| m.contains(&c));
        let r = ih::mayer_vietoris(&x, &p, &u, &w)?;
        let _ = writeln!(t, "mayer-vietoris (star of {v}, rest):");
        let _ = writeln!(t, "  degree X U V UV rank-in rank-sum");
        for d in &r.degrees {
            let _ = writeln!(t, "  {} {} {} {} {} {} {}", d.degree, d.x, d.u, d.v, d.uv, d.rank_in, d.rank_sum);
        }
        let _ = writeln!(t, "  alternating sum {} exact {}", r.alternating_sum, r.exact);
        value["mayer_vietoris"] = serde_json::to_value(&r)?;
    }
    emit(s, t, value)
}

pub fn emit_complex(s: &Settings, spec: &str) -> Result<Output> {
    let x = load::complex(spec)?;
    emit(s, ih::complex_to_text(&x), serde_json::to_value(ComplexJson::of(&x))?)
}

pub fn examples(s: &Settings) -> Result<Output> {
    let mut t = String::new();
    let fs = models::fsset_names();
    let mut list = Vec::new();
    for (name, about) in models::catalogue() {
        let kind = if fs.contains(&name) { "fsset+complex" } else { "complex" };
        let _ = writeln!(t, "{name:<18} {kind:<14} {about}");
        list.push(json!({"name": name, "kind": kind, "about": about}));
    }
    emit(s, t, Value::Array(list))
}
