//! Text format for per-attribute level maps: one line per attribute,
//! `levelmap <attribute> <requested> <prototype...>`, prototypes ascending.
//! Numbers print in shortest round-trip form, so parsing back is exact.

use anyhow::{anyhow, Result};

use granulate_core::som::Discretization;

pub fn write_levelmaps(maps: &[(String, Discretization)]) -> Result<String> {
    let mut out = String::new();
    for (name, map) in maps {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(anyhow!(
                "attribute name {name:?} cannot appear in a whitespace-delimited export"
            ));
        }
        out.push_str(&format!("levelmap {name} {}", map.requested));
        for p in &map.level_prototypes {
            out.push_str(&format!(" {p}"));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_levelmaps(text: &str) -> Result<Vec<(String, Discretization)>> {
    let mut maps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("levelmap") {
            return Err(anyhow!(
                "line {}: expected `levelmap <attribute> <requested> <prototypes...>`",
                lineno + 1
            ));
        }
        let name = parts
            .next()
            .ok_or_else(|| anyhow!("line {}: missing attribute name", lineno + 1))?;
        let requested: usize = parts
            .next()
            .ok_or_else(|| anyhow!("line {}: missing level count", lineno + 1))?
            .parse()
            .map_err(|_| anyhow!("line {}: bad level count", lineno + 1))?;
        let prototypes: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| anyhow!("line {}: bad prototype {p:?}", lineno + 1))
            })
            .collect::<Result<_>>()?;
        if prototypes.is_empty() {
            return Err(anyhow!("line {}: a level map needs prototypes", lineno + 1));
        }
        if prototypes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(anyhow!(
                "line {}: prototypes must be strictly ascending",
                lineno + 1
            ));
        }
        maps.push((
            name.to_string(),
            Discretization {
                level_prototypes: prototypes,
                requested,
            },
        ));
    }
    if maps.is_empty() {
        return Err(anyhow!("no level maps found"));
    }
    Ok(maps)
}
