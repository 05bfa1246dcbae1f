//! Golden replay reports, embedded at build time or read from `EQUIRES_GOLDEN_DIR`.

use anyhow::{bail, Context};

pub const ENV: &str = "EQUIRES_GOLDEN_DIR";

const EMBEDDED: [(&str, &str); 6] = [
    ("ex4_2", include_str!("../goldens/ex4_2.json")),
    ("ex_nohay", include_str!("../goldens/ex_nohay.json")),
    ("ex4_6", include_str!("../goldens/ex4_6.json")),
    ("ex6_9", include_str!("../goldens/ex6_9.json")),
    ("ex6_10", include_str!("../goldens/ex6_10.json")),
    ("ex8_6", include_str!("../goldens/ex8_6.json")),
];

pub fn load(name: &str) -> anyhow::Result<String> {
    if let Some(dir) = std::env::var_os(ENV) {
        let path = std::path::Path::new(&dir).join(format!("{name}.json"));
        return std::fs::read_to_string(&path).with_context(|| format!("cannot read golden {}", path.display()));
    }
    match EMBEDDED.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => Ok(text.to_string()),
        None => bail!("no embedded golden for `{name}`"),
    }
}

/// First differing line (1-based) with the golden and produced text, if any.
pub fn first_difference(golden: &str, produced: &str) -> Option<(usize, String, String)> {
    if golden == produced {
        return None;
    }
    let (mut g, mut p) = (golden.lines(), produced.lines());
    let mut line = 1;
    loop {
        match (g.next(), p.next()) {
            (Some(a), Some(b)) if a == b => line += 1,
            (a, b) => {
                let show = |s: Option<&str>| s.map_or_else(|| "<end of file>".to_string(), str::to_string);
                return Some((line, show(a), show(b)));
            }
        }
    }
}
