//! Reading command arguments: every object can be given as a path to a
//! JSON file or inline.
//!
//! Inline forms:
//! - space: `example52:J` or `line:n`
//! - pairs: `{(x1,y1),(y1,x1)}` (braces optional)
//! - measure: `(x1,y1):1/2, (x2,y2):1/2`
//! - points: `x1,y1,x2` (braces optional)
//! - function: `x1=0, y1=3/2, ...` (every point must be listed)

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;

use lipfree::io::{builtin_space, Atom, FunctionFile, MeasureFile, MetricFile, PairsFile, PointsFile};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))
}

/// Reads `arg` as a JSON file when such a file exists, else parses it inline.
fn file_or_inline<T: DeserializeOwned>(arg: &str, inline: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    let path = Path::new(arg);
    if path.is_file() {
        read_json(path)
    } else {
        inline(arg).with_context(|| format!("`{arg}` is neither a readable file nor valid inline syntax"))
    }
}

pub fn metric(arg: &str) -> Result<MetricFile> {
    file_or_inline(arg, |spec| {
        let space = builtin_space::<lipfree::Rational>(spec)?;
        Ok(MetricFile::from_space(&space))
    })
}

fn strip_braces(text: &str) -> &str {
    let t = text.trim();
    t.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(t).trim()
}

/// Splits `(a,b)` groups off the front of `text`, returning each pair and
/// whatever follows its closing parenthesis up to the next group.
fn pair_groups(text: &str) -> Result<Vec<([String; 2], String)>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        let body = rest.strip_prefix('(').ok_or_else(|| anyhow!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or_else(|| anyhow!("unclosed `(`"))?;
        let (a, b) = body[..close]
            .split_once(',')
            .ok_or_else(|| anyhow!("pair `({})` needs two labels", &body[..close]))?;
        let after = &body[close + 1..];
        let next = after.find('(').unwrap_or(after.len());
        out.push(([a.trim().to_owned(), b.trim().to_owned()], after[..next].trim().to_owned()));
        rest = &after[next..];
    }
    Ok(out)
}

pub fn pairs(arg: &str) -> Result<PairsFile> {
    file_or_inline(arg, |text| {
        let groups = pair_groups(strip_braces(text))?;
        if let Some((_, junk)) = groups.iter().find(|(_, t)| !t.trim_matches(',').trim().is_empty()) {
            bail!("unexpected `{junk}` between pairs");
        }
        Ok(PairsFile {
            pairs: groups.into_iter().map(|(p, _)| p).collect(),
        })
    })
}

pub fn measure(arg: &str) -> Result<MeasureFile> {
    file_or_inline(arg, |text| {
        let atoms = pair_groups(strip_braces(text))?
            .into_iter()
            .map(|([from, to], tail)| {
                let weight = tail
                    .trim()
                    .strip_prefix(':')
                    .ok_or_else(|| anyhow!("atom ({from},{to}) needs `:weight`"))?
                    .trim()
                    .trim_end_matches(',')
                    .trim();
                if weight.is_empty() {
                    bail!("atom ({from},{to}) has an empty weight");
                }
                Ok(Atom {
                    from,
                    to,
                    weight: weight.to_owned(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if atoms.is_empty() {
            bail!("a measure needs at least one atom");
        }
        Ok(MeasureFile { atoms })
    })
}

pub fn points(arg: &str) -> Result<PointsFile> {
    file_or_inline(arg, |text| {
        let points: Vec<String> = strip_braces(text)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if points.is_empty() {
            bail!("empty point list");
        }
        Ok(PointsFile { points })
    })
}

pub fn function(arg: &str) -> Result<FunctionFile> {
    file_or_inline(arg, |text| {
        let values = strip_braces(text)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|entry| {
                let (k, v) = entry
                    .split_once('=')
                    .ok_or_else(|| anyhow!("function entry `{entry}` is not `label=value`"))?;
                Ok((k.trim().to_owned(), v.trim().to_owned()))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FunctionFile { values })
    })
}
