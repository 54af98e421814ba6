use std::collections::BTreeMap;

use crate::color::{srgb_to_lab, LabColor};

use super::RefineConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct PaletteEntry {
    pub rgb: [f32; 3],
    pub lab: LabColor,
    /// Pixels represented by this entry, merged clusters included.
    pub count: usize,
}

/// Dominant colors, most frequent first.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

impl Palette {
    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn colors(&self) -> impl Iterator<Item = [f32; 3]> + '_ {
        self.entries.iter().map(|e| e.rgb)
    }

    /// Index and ΔE of the closest entry.
    pub fn nearest(&self, lab: &LabColor) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, e) in self.entries.iter().enumerate() {
            let d = e.lab.delta_e_squared(lab);
            if d < best.1 {
                best = (i, d);
            }
        }
        (best.0, best.1.sqrt())
    }
}

fn median(values: &mut [f32]) -> f32 {
    values.sort_by(|a, b| a.total_cmp(b));
    values[(values.len() - 1) / 2]
}

/// Coverage-ordered palette from a quantized Lab histogram.
///
/// Pixels are binned on a uniform Lab grid with cell size
/// `palette_match_radius / 2`. Each bin is represented by the per-channel
/// median of its members. Representatives closer than the match radius are
/// folded into the more frequent one, then entries are taken by frequency
/// until `percentile_coverage` of the pixels is covered or `max_colors` is
/// reached.
///
/// Returns an empty palette only for an empty input.
pub fn extract_palette(pixels: &[[f32; 3]], max_colors: usize, config: &RefineConfig) -> Palette {
    if pixels.is_empty() || max_colors == 0 {
        return Palette { entries: Vec::new() };
    }
    let cell = (config.palette_match_radius / 2.0).max(1e-6);
    let mut bins: BTreeMap<(i64, i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, p) in pixels.iter().enumerate() {
        let lab = srgb_to_lab(*p);
        let key = (
            (lab.l / cell).floor() as i64,
            (lab.a / cell).floor() as i64,
            (lab.b / cell).floor() as i64,
        );
        bins.entry(key).or_default().push(i);
    }
    let mut reps: Vec<PaletteEntry> = bins
        .into_values()
        .map(|members| {
            let mut rgb = [0.0f32; 3];
            let mut channel = Vec::with_capacity(members.len());
            for (c, out) in rgb.iter_mut().enumerate() {
                channel.clear();
                channel.extend(members.iter().map(|&i| pixels[i][c]));
                *out = median(&mut channel);
            }
            PaletteEntry {
                rgb,
                lab: srgb_to_lab(rgb),
                count: members.len(),
            }
        })
        .collect();
    // stable: equal counts keep Lab-grid order
    reps.sort_by_key(|r| std::cmp::Reverse(r.count));

    let radius_sq = config.palette_match_radius * config.palette_match_radius;
    let mut merged: Vec<PaletteEntry> = Vec::new();
    for rep in reps {
        match merged
            .iter_mut()
            .find(|m| m.lab.delta_e_squared(&rep.lab) < radius_sq)
        {
            Some(m) => m.count += rep.count,
            None => merged.push(rep),
        }
    }
    merged.sort_by_key(|r| std::cmp::Reverse(r.count));

    let total = pixels.len() as f64;
    let mut covered = 0usize;
    let mut entries = Vec::new();
    for entry in merged {
        if entries.len() >= max_colors || covered as f64 >= config.percentile_coverage * total {
            break;
        }
        covered += entry.count;
        entries.push(entry);
    }
    Palette { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: [f32; 3] = [0.9, 0.1, 0.1];
    const B: [f32; 3] = [0.1, 0.2, 0.9];
    const C: [f32; 3] = [0.1, 0.8, 0.2];

    fn repeat(parts: &[([f32; 3], usize)]) -> Vec<[f32; 3]> {
        parts
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat_n(c, n))
            .collect()
    }

    #[test]
    fn single_color() {
        let cfg = RefineConfig::default();
        for max in [1, 2, 10] {
            let p = extract_palette(&repeat(&[(A, 37)]), max, &cfg);
            assert_eq!(p.colors().collect::<Vec<_>>(), vec![A]);
        }
    }

    #[test]
    fn frequency_order_until_coverage() {
        let cfg = RefineConfig::default();
        let p = extract_palette(&repeat(&[(B, 10), (A, 90)]), 2, &cfg);
        assert_eq!(p.colors().collect::<Vec<_>>(), vec![A, B]);
    }

    #[test]
    fn max_colors_caps_coverage() {
        let cfg = RefineConfig::default();
        let px = repeat(&[(C, 20), (A, 50), (B, 30)]);
        // direct frequency count: A=50, B=30, C=20
        let mut counts = [(A, 0usize), (B, 0), (C, 0)];
        for p in &px {
            counts.iter_mut().find(|(c, _)| c == p).unwrap().1 += 1;
        }
        counts.sort_by(|a, b| b.1.cmp(&a.1));
        let p = extract_palette(&px, 2, &cfg);
        assert_eq!(p.colors().collect::<Vec<_>>(), vec![counts[0].0, counts[1].0]);
    }

    #[test]
    fn coverage_stops_early() {
        let cfg = RefineConfig::default();
        let p = extract_palette(&repeat(&[(A, 96), (B, 4)]), 10, &cfg);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn near_duplicates_merge() {
        let cfg = RefineConfig::default();
        let a2 = [0.905, 0.1, 0.1];
        let p = extract_palette(&repeat(&[(A, 50), (a2, 40), (B, 10)]), 3, &cfg);
        assert_eq!(p.len(), 2);
        for (i, e) in p.entries().iter().enumerate() {
            for f in &p.entries()[i + 1..] {
                assert!(e.lab.delta_e(&f.lab) >= cfg.palette_match_radius);
            }
        }
    }
}
