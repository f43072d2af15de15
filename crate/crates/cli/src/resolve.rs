//! Descriptors to library objects.

use std::path::Path;
use std::sync::Arc;

use rearrangement::adfamily::{rational_ad_family, signed_block_series, BlockSet};
use rearrangement::adversaries::{flip_permutation, preserved_set, IncFn, IntervalPartition};
use rearrangement::rearrangers::{
    excess_schedule_set, riemann_oscillate, riemann_to_infinity, riemann_to_target, Progression, SetRef, Shuffle, Sign,
};
use rearrangement::{FileSource, Identity, PartialMap, Perm, Sampling, Tail, TermSource};

use crate::descriptor::Descriptor;
use crate::CliError;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Series kinds that take no parameters, usable as `tail=` or `series=` values.
fn simple_series(name: &str) -> Option<TermSource> {
    match name {
        "alt-harmonic" => Some(TermSource::AltHarmonic),
        "harmonic" => Some(TermSource::Harmonic),
        "zero" => Some(TermSource::Zero),
        _ => None,
    }
}

pub fn series(d: &Descriptor) -> Result<TermSource, CliError> {
    let mut r = d.reader();
    let s = match d.kind.as_str() {
        "alt-harmonic" | "harmonic" | "zero" => simple_series(&d.kind).expect("listed"),
        "alt-power" => TermSource::alt_power(r.need("alpha")?).map_err(usage)?,
        "power" => TermSource::power(r.need("alpha")?).map_err(usage)?,
        "signed-blocks" => signed_block_series(block_set_from(&mut r, &d.kind)?),
        "file" => {
            let path: String = r.need("path")?;
            let tail = match r.raw("tail").unwrap_or("none") {
                "none" => Tail::None,
                "zero" => Tail::Zero,
                other => Tail::Catalog(Box::new(
                    simple_series(other).ok_or_else(|| usage(format!("file: unknown tail '{other}'")))?,
                )),
            };
            r.finish()?;
            // reading the file is a runtime matter, not a usage one
            let f = FileSource::load(Path::new(&path), tail).map_err(|e| CliError::Runtime(e.to_string()))?;
            return Ok(TermSource::File(Arc::new(f)));
        }
        other => return Err(usage(format!("unknown series kind '{other}'"))),
    };
    r.finish()?;
    Ok(s)
}

/// `d` scalar descriptors read side by side.
pub fn stacked(ds: &[Descriptor]) -> Result<TermSource, CliError> {
    let parts = ds.iter().map(series).collect::<Result<Vec<_>, _>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    TermSource::stack(parts).map_err(usage)
}

pub fn set(d: &Descriptor) -> Result<SetRef, CliError> {
    let mut r = d.reader();
    let s: SetRef = match d.kind.as_str() {
        "evens" => Arc::new(Progression::evens()),
        "odds" => Arc::new(Progression::odds()),
        "progression" => Arc::new(
            Progression::new(r.or("offset", 0)?, r.need("step")?).ok_or_else(|| usage("progression: step must be ≥ 2"))?,
        ),
        "excess" => {
            let check = r.or("check", 1_000_000)?;
            Arc::new(excess_schedule_set(r.need("beta")?, r.need("c")?, check).map_err(usage)?)
        }
        "orbit" => Arc::new(preserved_set(affine(&mut r)?).map_err(usage)?),
        other => return Err(usage(format!("unknown set kind '{other}'"))),
    };
    r.finish()?;
    Ok(s)
}

fn affine(r: &mut crate::descriptor::Reader<'_>) -> Result<IncFn, CliError> {
    IncFn::affine(r.or("mul", 2)?, r.or("add", 2)?).map_err(usage)
}

fn named_set(name: &str) -> Result<SetRef, CliError> {
    set(&Descriptor::new(name))
}

/// Permutations; `default_series` feeds the Riemann kinds unless they name
/// their own with `series=`.
pub fn perm(d: &Descriptor, default_series: &TermSource) -> Result<Perm, CliError> {
    let mut r = d.reader();
    let src = |r: &mut crate::descriptor::Reader<'_>| -> Result<TermSource, CliError> {
        match r.raw("series") {
            None => Ok(default_series.clone()),
            Some(name) => simple_series(name).ok_or_else(|| usage(format!("{}: unknown series '{name}'", d.kind))),
        }
    };
    let p: Perm = match d.kind.as_str() {
        "identity" => Arc::new(Identity),
        "table" => Arc::new(PartialMap::from_values(&r.list::<usize>("values")?.unwrap_or_default()).map_err(usage)?),
        "flip" => Arc::new(flip_permutation(partition(&mut r)?)),
        "riemann" => {
            let s = src(&mut r)?;
            let prefix = r.list::<usize>("prefix")?.unwrap_or_default();
            riemann_to_target(&s, r.need("target")?, &prefix).map_err(usage)?
        }
        "riemann-infinity" => {
            let s = src(&mut r)?;
            let sign = match r.raw("sign").unwrap_or("plus") {
                "plus" => Sign::Plus,
                "minus" => Sign::Minus,
                other => return Err(usage(format!("riemann-infinity: sign must be plus or minus, got '{other}'"))),
            };
            let prefix = r.list::<usize>("prefix")?.unwrap_or_default();
            riemann_to_infinity(&s, sign, &prefix).map_err(usage)?
        }
        "riemann-oscillate" => {
            let s = src(&mut r)?;
            riemann_oscillate(&s, r.need("lo")?, r.need("hi")?).map_err(usage)?
        }
        "shuffle" => {
            let a = match r.raw("a").unwrap_or("excess") {
                "excess" => {
                    let check = r.or("check", 1_000_000)?;
                    Arc::new(excess_schedule_set(r.need("beta")?, r.or("c", 1.0)?, check).map_err(usage)?) as SetRef
                }
                name => named_set(name)?,
            };
            let b = named_set(r.raw("b").unwrap_or("evens"))?;
            Arc::new(Shuffle::new(a, b))
        }
        other => return Err(usage(format!("unknown permutation kind '{other}'"))),
    };
    r.finish()?;
    Ok(p)
}

fn partition(r: &mut crate::descriptor::Reader<'_>) -> Result<IntervalPartition, CliError> {
    let p = if let Some(w) = r.get::<usize>("width")? {
        IntervalPartition::uniform(w)
    } else if let Some(cuts) = r.list::<usize>("cuts")? {
        IntervalPartition::explicit(cuts, r.need("tail")?)
    } else if let Some(seed) = r.get::<u64>("seed")? {
        IntervalPartition::random(seed, r.need("max")?)
    } else if let Some(stride) = r.get::<usize>("stride")? {
        let a = preserved_set(affine(r)?).map_err(usage)?;
        IntervalPartition::from_set(Arc::new(a), stride)
    } else {
        return Err(usage("flip: give one of width=, cuts=…,tail=, seed=…,max=, or stride=…[,mul=,add=]"));
    };
    p.map_err(usage)
}

pub fn block_set(d: &Descriptor) -> Result<BlockSet, CliError> {
    let mut r = d.reader();
    let b = match d.kind.as_str() {
        "odd" => BlockSet::Odd,
        "even" => BlockSet::Even,
        "empty" => BlockSet::empty(),
        "list" => BlockSet::Explicit(r.list::<u64>("blocks")?.unwrap_or_default().into_iter().collect()),
        "adset" => {
            let real: f64 = r.need("real")?;
            let depth: usize = r.need("depth")?;
            let fam = rational_ad_family(&[real], depth).map_err(usage)?;
            fam[0].blocks()
        }
        other => return Err(usage(format!("unknown block set kind '{other}'"))),
    };
    r.finish()?;
    Ok(b)
}

/// `signed-blocks:set=odd`, `set=list,blocks=1;3`, or `real=…,depth=…`.
fn block_set_from(r: &mut crate::descriptor::Reader<'_>, kind: &str) -> Result<BlockSet, CliError> {
    if let Some(real) = r.get::<f64>("real")? {
        let depth: usize = r.need("depth")?;
        return Ok(rational_ad_family(&[real], depth).map_err(usage)?[0].blocks());
    }
    match r.raw("set").unwrap_or("odd") {
        "odd" => Ok(BlockSet::Odd),
        "even" => Ok(BlockSet::Even),
        "list" => Ok(BlockSet::Explicit(r.list::<u64>("blocks")?.unwrap_or_default().into_iter().collect())),
        other => Err(usage(format!("{kind}: unknown set '{other}'"))),
    }
}

pub fn sampling(d: &Descriptor) -> Result<Sampling, CliError> {
    let mut r = d.reader();
    let s = match d.kind.as_str() {
        "geometric" => Sampling::Geometric { dense: r.or("dense", 100)?, per_decade: r.or("per-decade", 40)? },
        "every" => {
            let k: usize = r.need("k")?;
            if k == 0 {
                return Err(usage("every: k must be positive"));
            }
            Sampling::Every(k)
        }
        "explicit" => Sampling::Explicit(r.list::<usize>("at")?.unwrap_or_default()),
        other => return Err(usage(format!("unknown sampling kind '{other}'"))),
    };
    r.finish()?;
    Ok(s)
}

/// Reals for the almost-disjoint family: decimals or `sqrtN`.
pub fn real(token: &str) -> Result<f64, CliError> {
    let t = token.trim();
    let v = match t.strip_prefix("sqrt") {
        Some(n) => n.parse::<f64>().map(f64::sqrt),
        None => t.parse::<f64>(),
    };
    v.ok().filter(|x| x.is_finite()).ok_or_else(|| usage(format!("cannot parse real '{t}'")))
}
