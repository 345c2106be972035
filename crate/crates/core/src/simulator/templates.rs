//! Slot-filling utterance templates and the phrase vocabulary used by the
//! simulators.

use rand::seq::IndexedRandom;
use rand::Rng;
use thiserror::Error;

use crate::geometry::{AnchoredDirection, Depth, Lateral, SpatialRelation, Vertical};
use crate::shapes::ShapeKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template `{template}` has unbound slot `{slot}`")]
    UnboundSlot { template: String, slot: String },
}

/// Replaces every `{name}` in `template` with its binding. Any slot left
/// unbound is an error.
pub fn fill(template: &str, slots: &[(&str, &str)]) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len() + 32);
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let Some(end) = rest[start..].find('}').map(|e| start + e) else {
            break;
        };
        let name = &rest[start + 1..end];
        match slots.iter().find(|(k, _)| *k == name) {
            Some((_, v)) => out.push_str(v),
            None => {
                return Err(TemplateError::UnboundSlot { template: template.to_string(), slot: name.to_string() })
            }
        }
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(tidy(&out))
}

/// Collapses doubled spaces left by empty bindings, trims and capitalizes.
fn tidy(s: &str) -> String {
    let joined = s.split_whitespace().collect::<Vec<_>>().join(" ");
    let joined = joined.replace(" ,", ",").replace(" .", ".").replace(" ?", "?").replace(" !", "!");
    let mut chars = joined.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

pub fn pick<'a, R: Rng + ?Sized>(rng: &mut R, options: &[&'a str]) -> &'a str {
    options.choose(rng).copied().expect("non-empty template list")
}

pub fn number_word(n: usize) -> String {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
        "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
    ];
    WORDS.get(n).map(|w| w.to_string()).unwrap_or_else(|| n.to_string())
}

/// `a` or `an` for the word that follows.
pub fn article(next: &str) -> &'static str {
    match next.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u' | '8') => "an",
        _ => "a",
    }
}

/// "a red block", "three red blocks", "a floating red block".
pub fn block_phrase(count: usize, color: &str, floating: bool) -> String {
    let adj = if floating { format!("floating {color}") } else { color.to_string() };
    if count == 1 {
        format!("{} {adj} block", article(&adj))
    } else {
        format!("{} {adj} blocks", number_word(count))
    }
}

fn lateral_phrase(l: Lateral, with_object: bool) -> &'static str {
    match (l, with_object) {
        (Lateral::Left, true) => "to the left of",
        (Lateral::Left, false) => "to the left",
        (Lateral::Right, true) => "to the right of",
        (Lateral::Right, false) => "to the right",
    }
}

fn depth_phrase(d: Depth, with_object: bool) -> &'static str {
    match (d, with_object) {
        (Depth::Front, true) => "in front of",
        (Depth::Front, false) => "in front",
        (Depth::Behind, _) => "behind",
    }
}

fn vertical_phrase<R: Rng + ?Sized>(rng: &mut R, v: Vertical, with_object: bool) -> &'static str {
    match (v, with_object) {
        (Vertical::Above, true) => pick(rng, &["on top of", "above"]),
        (Vertical::Above, false) => pick(rng, &["on top", "above"]),
        (Vertical::Below, true) => pick(rng, &["below", "under", "underneath"]),
        (Vertical::Below, false) => pick(rng, &["below", "underneath"]),
    }
}

fn join_and(parts: &[String]) -> String {
    match parts.len() {
        0 => String::new(),
        1 => parts[0].clone(),
        2 => format!("{} and {}", parts[0], parts[1]),
        n => format!("{}, and {}", parts[..n - 1].join(", "), parts[n - 1]),
    }
}

/// Relation words for a neighbor of the reference, ending with a preposition
/// when `with_object` (e.g. "above and to the left of"). `lateral_first`
/// puts the left/right part before the front/behind part.
pub fn relation_phrase<R: Rng + ?Sized>(
    rng: &mut R,
    rel: &SpatialRelation,
    with_object: bool,
    lateral_first: bool,
) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let Some(v) = rel.vertical {
        parts.push(vertical_phrase(rng, v, with_object).to_string());
    }
    let lat = rel.lateral.map(|l| lateral_phrase(l, with_object).to_string());
    let dep = rel.depth.map(|d| depth_phrase(d, with_object).to_string());
    if lateral_first {
        parts.extend(lat);
        parts.extend(dep);
    } else {
        parts.extend(dep);
        parts.extend(lat);
    }
    let horizontal_pair = rel.lateral.is_some() && rel.depth.is_some() && rel.vertical.is_none();
    let joined = join_and(&parts);
    if horizontal_pair && rng.random_bool(0.5) {
        format!("diagonally {joined}")
    } else {
        joined
    }
}

fn counted(n: i32, what: &str) -> String {
    let n = n.unsigned_abs() as usize;
    let unit = if n == 1 { "block" } else { "blocks" };
    format!("{} {unit} {what}", number_word(n))
}

/// Relation with per-axis block counts, e.g. "one block to the left, two
/// blocks below, and one block in front". `offset` is the perspective
/// offset `[x′, y, z′]` from the reference.
pub fn counted_relation_phrase(rel: &SpatialRelation, offset: [i32; 3], lateral_first: bool) -> String {
    let mut parts = Vec::new();
    if let Some(v) = rel.vertical {
        parts.push(counted(offset[1], if v == Vertical::Above { "above" } else { "below" }));
    }
    let lat = rel
        .lateral
        .map(|l| counted(offset[0], if l == Lateral::Left { "to the left" } else { "to the right" }));
    let dep = rel
        .depth
        .map(|d| counted(offset[2], if d == Depth::Front { "in front" } else { "behind" }));
    if lateral_first {
        parts.extend(lat);
        parts.extend(dep);
    } else {
        parts.extend(dep);
        parts.extend(lat);
    }
    join_and(&parts)
}

/// Builder-anchored growth words, e.g. "up and to the left of you".
pub fn direction_phrase(d: &AnchoredDirection) -> String {
    let mut parts = Vec::new();
    if let Some(v) = d.vertical {
        parts.push(if v == Vertical::Above { "up" } else { "down" }.to_string());
    }
    if let Some(dep) = d.depth {
        parts.push(if dep == Depth::Front { "toward you" } else { "away from you" }.to_string());
    }
    if let Some(l) = d.lateral {
        parts.push(if l == Lateral::Left { "to the left of you" } else { "to the right of you" }.to_string());
    }
    join_and(&parts)
}

/// Shape names by kind and orientation.
pub fn shape_names(kind: ShapeKind, vertical: bool) -> &'static [&'static str] {
    match (kind, vertical) {
        (ShapeKind::Row, false) => &["row", "line"],
        (ShapeKind::Row, true) => &["column", "pillar", "tower"],
        (ShapeKind::Diagonal, false) => &["diagonal", "diagonal line"],
        (ShapeKind::Diagonal, true) => &["diagonal", "staircase", "stairway"],
        (ShapeKind::Plane, false) => &["plane", "layer"],
        (ShapeKind::Plane, true) => &["plane", "wall"],
        (ShapeKind::TShape, _) => &["T-shape"],
        (ShapeKind::LShape, _) => &["L-shape"],
        (ShapeKind::UShape, _) => &["U-shape"],
    }
}

pub const PLACE_TEMPLATES: &[&str] = &[
    "place {block} {location}",
    "put {block} {location}",
    "now add {block} {location}",
    "add {block} {location}",
    "next, place {block} {location}",
];

pub const PLACE_NO_LOCATION_TEMPLATES: &[&str] = &["place {block}", "put down {block}", "now add {block}"];

pub const START_TEMPLATES: &[&str] = &[
    "first start by placing {block} on the ground",
    "let's start with {block} on the ground",
    "to begin, put {block} on the ground",
];

pub const START_NO_LOCATION_TEMPLATES: &[&str] = &["first start by placing {block}", "to begin, put down {block}"];

pub const REMOVE_TEMPLATES: &[&str] = &["remove {target}", "please take away {target}", "now remove {target}", "delete {target}"];

pub const REMOVE_LAST_TEMPLATES: &[&str] = &["remove that block", "actually, remove that block", "undo that last block"];

pub const WHERE_QUESTIONS: &[&str] = &["where?", "where should it go?", "where do you want it?"];

pub const COLOR_QUESTIONS: &[&str] = &["what color?", "which color?", "what color should it be?"];

pub const SIZE_QUESTIONS: &[&str] = &["how big?", "what size?", "how many blocks?"];

pub const DIRECTION_QUESTIONS: &[&str] = &["which direction?", "which way should it go?"];

pub const CONFIRMATIONS: &[&str] = &["good", "great job!", "perfect", "nice, thanks", "yes, that's right"];

pub const SHAPE_TEMPLATES: &[&str] = &[
    "build {shape} {location} {direction}",
    "add {shape} {location} {direction}",
    "now make {shape} {location} {direction}",
];

pub const COLOR_ANSWERS: &[&str] = &["{color}", "make it {color}", "{color}, please"];

pub const DIRECTION_ANSWERS: &[&str] = &["{direction}", "it should go {direction}"];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fill_binds_slots() {
        let s = fill("put {block} {location}", &[("block", "a red block"), ("location", "behind the blue one")]).unwrap();
        assert_eq!(s, "Put a red block behind the blue one");
        let err = fill("put {block} {where}", &[("block", "x")]).unwrap_err();
        assert!(matches!(err, TemplateError::UnboundSlot { slot, .. } if slot == "where"));
        assert_eq!(fill("place {block} {location}", &[("block", "a block"), ("location", "")]).unwrap(), "Place a block");
    }

    #[test]
    fn block_phrases() {
        assert_eq!(block_phrase(1, "orange", false), "an orange block");
        assert_eq!(block_phrase(3, "red", false), "three red blocks");
        assert_eq!(block_phrase(1, "red", true), "a floating red block");
    }

    #[test]
    fn relation_phrases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let behind = SpatialRelation { lateral: None, vertical: None, depth: Some(Depth::Behind) };
        assert_eq!(relation_phrase(&mut rng, &behind, true, true), "behind");
        let rel = SpatialRelation { lateral: Some(Lateral::Left), vertical: Some(Vertical::Below), depth: Some(Depth::Front) };
        assert_eq!(
            counted_relation_phrase(&rel, [1, -2, -1], true),
            "two blocks below, one block to the left, and one block in front"
        );
        let d = AnchoredDirection { lateral: Some(Lateral::Left), vertical: Some(Vertical::Above), depth: None };
        assert_eq!(direction_phrase(&d), "up and to the left of you");
    }
}
