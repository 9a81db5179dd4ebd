use clap::{Subcommand, ValueEnum};
use serde_json::{json, Value};

use catdiv_core::burnside::{is_pullback, jmap, m_simplex, pmap, span_compose};
use catdiv_core::cantor::{act_with, same_orbit_bounded, ActionEncoding};
use catdiv_core::localized::k0_presentation;
use catdiv_core::sheaf::Resolution;
use catdiv_core::{Field, LocObject, Localized, Sheaves, SmoothNumber};

use crate::verify::{self, Suite};
use crate::wire::*;
use crate::{CliError, Config, Result, Status};

/// Runs `$body` with `$f` bound to the configured field.
macro_rules! with_field {
    ($cfg:expr, |$f:ident| $body:expr) => {
        match $cfg.field {
            catdiv_core::FieldTag::Rationals => {
                let $f = catdiv_core::Rationals;
                $body
            }
            catdiv_core::FieldTag::Prime(p) => {
                let $f = catdiv_core::PrimeField::new(p).expect("field tags hold primes");
                $body
            }
        }
    };
}
pub(crate) use with_field;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rational dimension dim V / m of an object
    Dim {
        #[arg(long)]
        object: String,
    },
    /// Search for an isomorphism up to --level-bound
    Iso {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Present a morphism at its least level
    Normalize {
        #[arg(long)]
        morphism: String,
    },
    /// Grothendieck group truncated at the divisors of --bound
    K0 {
        #[arg(long)]
        bound: u64,
    },
    /// Act on a point of the Cantor space by a torsion element
    Act {
        #[arg(long)]
        t: String,
        #[arg(long)]
        point: String,
        /// "lsb" is a negative control and needs --negative-controls
        #[arg(long, value_enum, default_value = "msb")]
        encoding: Encoding,
    },
    /// Decide whether two points share an orbit, with a witness
    Orbit {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Boolean algebra and dynamics of clopen sets
    Clopen {
        #[command(subcommand)]
        op: ClopenOp,
    },
    /// Spans of finite sets and the simplices of M_S
    Burnside {
        #[command(subcommand)]
        op: BurnsideOp,
    },
    /// Equivariant sheaves at finite depth
    Sheaf {
        #[command(subcommand)]
        op: SheafOp,
    },
    /// Run a property suite at the configured bounds
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Msb,
    Lsb,
}

#[derive(Debug, Subcommand)]
pub enum ClopenOp {
    Union {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    Intersect {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    Complement {
        #[arg(long)]
        a: String,
    },
    Member {
        #[arg(long)]
        a: String,
        #[arg(long)]
        point: String,
    },
    Translate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        t: String,
    },
    /// Image under multiplication by m
    MultImage {
        #[arg(long)]
        a: String,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BurnsideOp {
    /// The map ⟨n⟩ → ⟨m⟩, i ↦ ⌊i/(n/m)⌋
    Pmap {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// The map ⟨n⟩ → ⟨m⟩, i ↦ i mod m
    Jmap {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// The pullback composite g ∘ f of two spans
    Compose {
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
    },
    /// The simplex of a chain "m0:n0,m1:n1,..."
    Simplex {
        #[arg(long)]
        chain: String,
    },
    /// Check that diamonds are pullbacks, for one chain or all chains within the bounds
    Validate {
        #[arg(long)]
        chain: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SheafOp {
    /// Hom space between two sheaves, with its stabilization certificate
    Hom {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// defaults to the least depth separating the levels
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Class of a sheaf in S⁻¹ℤ
    Dim {
        #[arg(long)]
        sheaf: String,
    },
    /// Compare Hom between two objects in the localized and sheaf models
    Compare {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

pub(crate) fn execute(cmd: &Command, cfg: &Config) -> Result<(Status, Value)> {
    let primes = &cfg.primes;
    let ok = |v: Value| Ok((Status::Ok, v));
    match cmd {
        Command::Dim { object } => {
            let x = object_from_value(&parse_json(object, "--object")?, primes, cfg.field)?;
            let d = x.rational_dim();
            ok(json!({ "object": object_to_value(&x, cfg.field), "dim": d.to_string(), "dim_exact": to_value(&d) }))
        }
        Command::Iso { x, y } => with_field!(cfg, |field| iso(Localized::new(field, primes.clone()), x, y, cfg)),
        Command::Normalize { morphism } => with_field!(cfg, |field| {
            let loc = Localized::new(field, primes.clone());
            let f = morphism_from_value(&loc, &parse_json(morphism, "--morphism")?)?;
            let n = loc.normalize(&f);
            ok(json!({ "input_level": f.level.value(), "normal_form": morphism_to_value(&loc, &n) }))
        }),
        Command::K0 { bound } => ok(k0(&smooth_from_str(&bound.to_string(), primes, "--bound")?)),
        Command::Act { t, point, encoding } => {
            let enc = match encoding {
                Encoding::Msb => ActionEncoding::MostSignificantFirst,
                Encoding::Lsb if cfg.negative_controls => ActionEncoding::LeastSignificantFirst,
                Encoding::Lsb => return Err(CliError::Parse("--encoding lsb requires --negative-controls".into())),
            };
            let t = torsion_from_str(t, primes)?;
            let x = point_from_value(&parse_json(point, "--point")?, primes)?;
            let y = act_with(enc, &t, &x);
            ok(json!({ "t": torsion_to_value(&t), "point": point_to_value(&x), "image": point_to_value(&y) }))
        }
        Command::Orbit { x, y } => {
            let px = point_from_value(&parse_json(x, "--x")?, primes)?;
            let py = point_from_value(&parse_json(y, "--y")?, primes)?;
            match same_orbit_bounded(&px, &py, cfg.level_bound)? {
                Some(w) => ok(json!({
                    "same_orbit": true,
                    "witness": to_value(&w),
                    "verified": w.verify(&px, &py),
                })),
                None => Err(CliError::BoundExhausted(format!(
                    "no level <= {} relates the points; raise --level-bound",
                    cfg.level_bound
                ))),
            }
        }
        Command::Clopen { op } => ok(clopen(op, cfg)?),
        Command::Burnside { op } => burnside(op, cfg),
        Command::Sheaf { op } => with_field!(cfg, |field| ok(sheaf(Sheaves::new(field, primes.clone()), op, cfg)?)),
        Command::Verify { suite } => {
            let report = verify::run_suite(*suite, cfg)?;
            let status = if report.all_as_expected { Status::Ok } else { Status::Fail };
            Ok((status, to_value(&report)))
        }
    }
}

fn iso<F: Field>(loc: Localized<F>, x: &str, y: &str, cfg: &Config) -> Result<(Status, Value)> {
    let px = object_from_value(&parse_json(x, "--x")?, &loc.primes, cfg.field)?;
    let py = object_from_value(&parse_json(y, "--y")?, &loc.primes, cfg.field)?;
    let same_dim = px.rational_dim() == py.rational_dim();
    let found = loc.find_iso(&px, &py, cfg.level_bound)?;
    match (&found, same_dim) {
        (None, true) => Err(CliError::BoundExhausted(format!(
            "{px} and {py} have equal dimension but no isomorphism exists at levels <= {}",
            cfg.level_bound
        ))),
        _ => Ok((
            Status::Ok,
            json!({
                "x": object_to_value(&px, cfg.field),
                "y": object_to_value(&py, cfg.field),
                "isomorphic": found.is_some(),
                "iso": found.map(|f| morphism_to_value(&loc, &f)),
            }),
        )),
    }
}

fn k0(bound: &SmoothNumber) -> Value {
    let k = k0_presentation(bound);
    let group = match (k.free_rank, k.torsion.is_empty()) {
        (1, true) => "Z".to_string(),
        (r, _) => {
            let mut parts = vec![format!("Z^{r}")];
            parts.extend(k.torsion.iter().map(|d| format!("Z/{d}")));
            parts.join(" + ")
        }
    };
    let map: Vec<Value> = k
        .generators
        .iter()
        .zip(&k.class_map)
        .zip(&k.coordinates)
        .map(|((m, class), coords)| {
            json!({ "generator": format!("g_{m}"), "class": class.to_string(), "coordinates": ints(coords) })
        })
        .collect();
    json!({
        "bound": bound.value(),
        "group": group,
        "free_rank": k.free_rank,
        "torsion": ints(&k.torsion),
        "invariant_factors": ints(&k.invariant_factors),
        "generator_class": k.generator_class.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "map": map,
    })
}

fn clopen(op: &ClopenOp, cfg: &Config) -> Result<Value> {
    let primes = &cfg.primes;
    let parse = |s: &str| clopen_from_value(&parse_json(s, "clopen")?, primes);
    let set = |u: catdiv_core::Clopen| json!({ "op": clopen_op_name(op), "result": clopen_to_value(&u) });
    Ok(match op {
        ClopenOp::Union { a, b } => set(parse(a)?.union(&parse(b)?)),
        ClopenOp::Intersect { a, b } => set(parse(a)?.intersection(&parse(b)?)),
        ClopenOp::Complement { a } => set(parse(a)?.complement()),
        ClopenOp::Translate { a, t } => set(parse(a)?.translate(&torsion_from_str(t, primes)?)),
        ClopenOp::MultImage { a, m } => set(parse(a)?.mult(&smooth_from_str(&m.to_string(), primes, "--m")?)),
        ClopenOp::Member { a, point } => {
            let x = point_from_value(&parse_json(point, "--point")?, primes)?;
            json!({ "op": "member", "result": parse(a)?.contains(&x) })
        }
    })
}

fn clopen_op_name(op: &ClopenOp) -> &'static str {
    match op {
        ClopenOp::Union { .. } => "union",
        ClopenOp::Intersect { .. } => "intersect",
        ClopenOp::Complement { .. } => "complement",
        ClopenOp::Member { .. } => "member",
        ClopenOp::Translate { .. } => "translate",
        ClopenOp::MultImage { .. } => "mult-image",
    }
}

fn burnside(op: &BurnsideOp, cfg: &Config) -> Result<(Status, Value)> {
    let primes = &cfg.primes;
    let sm = |v: &u64, what| smooth_from_str(&v.to_string(), primes, what);
    let ok = |v: Value| Ok((Status::Ok, v));
    match op {
        BurnsideOp::Pmap { m, n } => ok(to_value(&pmap(&sm(m, "--m")?, &sm(n, "--n")?)?)),
        BurnsideOp::Jmap { m, n } => ok(to_value(&jmap(&sm(m, "--m")?, &sm(n, "--n")?)?)),
        BurnsideOp::Compose { g, f } => {
            let g = span_from_value(&parse_json(g, "--g")?)?;
            let f = span_from_value(&parse_json(f, "--f")?)?;
            ok(to_value(&span_compose(&g, &f)?))
        }
        BurnsideOp::Simplex { chain } => {
            let s = m_simplex(&chain_from_str(chain, primes)?);
            let vertices: Vec<Value> =
                s.vertices.iter().map(|(&(a, b), &k)| json!({ "s": a, "t": b, "size": k })).collect();
            let diamonds = s
                .diamonds
                .iter()
                .map(|(&(a, b), sq)| Ok(json!({ "s": a, "t": b, "square": to_value(sq), "pullback": is_pullback(sq)? })))
                .collect::<Result<Vec<_>>>()?;
            ok(json!({ "chain": chain_to_string(&s.chain), "vertices": vertices, "diamonds": diamonds }))
        }
        BurnsideOp::Validate { chain } => {
            let chains = match chain {
                Some(c) => vec![chain_from_str(c, primes)?],
                None => verify::chains(primes, cfg.level_bound, cfg.depth_bound.min(3)),
            };
            let mut failures = Vec::new();
            let mut diamonds = 0;
            for c in &chains {
                for ((a, b), sq) in &m_simplex(c).diamonds {
                    diamonds += 1;
                    if !is_pullback(sq)? && failures.len() < 8 {
                        failures.push(json!({ "chain": chain_to_string(c), "s": a, "t": b }));
                    }
                }
            }
            let status = if failures.is_empty() { Status::Ok } else { Status::Fail };
            Ok((status, json!({ "chains": chains.len(), "diamonds": diamonds, "failures": failures })))
        }
    }
}

fn sheaf<F: Field>(sh: Sheaves<F>, op: &SheafOp, cfg: &Config) -> Result<Value> {
    let primes = sh.primes().clone();
    Ok(match op {
        SheafOp::Hom { f, g, depth } => {
            let f = sheaf_from_value(&parse_json(f, "--f")?, &primes, cfg.field)?;
            let g = sheaf_from_value(&parse_json(g, "--g")?, &primes, cfg.field)?;
            let depth = match depth {
                Some(d) => *d,
                None => {
                    let levels: Vec<&SmoothNumber> = f.summands.iter().chain(&g.summands).map(|x| &x.level).collect();
                    Resolution::separating(&primes, &levels)?.depth
                }
            };
            let h = sh.sheaf_hom(&f, &g, depth)?;
            json!({ "f": sheaf_to_value(&f, cfg.field), "g": sheaf_to_value(&g, cfg.field), "hom": to_value(&h) })
        }
        SheafOp::Dim { sheaf } => {
            let f = sheaf_from_value(&parse_json(sheaf, "--sheaf")?, &primes, cfg.field)?;
            let d = sh.sheaf_dim(&f);
            json!({ "sheaf": sheaf_to_value(&f, cfg.field), "dim": d.to_string(), "dim_exact": to_value(&d) })
        }
        SheafOp::Compare { x, y } => {
            let x = object_from_value(&parse_json(x, "--x")?, &primes, cfg.field)?;
            let y = object_from_value(&parse_json(y, "--y")?, &primes, cfg.field)?;
            compare(&sh, &x, &y, cfg)?
        }
    })
}

fn compare<F: Field>(sh: &Sheaves<F>, x: &LocObject, y: &LocObject, cfg: &Config) -> Result<Value> {
    let res = Resolution::separating(sh.primes(), &[&x.level, &y.level])?;
    let h = sh.sheaf_hom(&sh.psi_object(x), &sh.psi_object(y), res.depth)?;
    // the localized Hom presented at the resolution level R
    let l = res.r.clone();
    let loc_dim = sh.loc.hom_dim_at(x, y, &l)?;
    let mut out = json!({
        "x": object_to_value(x, cfg.field),
        "y": object_to_value(y, cfg.field),
        "level": l.value(),
        "localized_hom_dim": loc_dim,
        "sheaf_hom": to_value(&h),
        "agree": h.stabilized && h.dim == loc_dim,
    });
    if cfg.negative_controls {
        let sky = sh.skyscraper_hom_dim(x, y);
        out["skyscraper_hom_dim"] = json!(sky);
        out["skyscraper_agrees"] = json!(sky == loc_dim);
    }
    Ok(out)
}
