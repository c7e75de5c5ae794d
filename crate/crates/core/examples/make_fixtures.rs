//! Regenerates the committed test fixtures under `tests/fixtures/`.
//!
//! cargo run --example make_fixtures

use std::path::Path;

use dimdecon::codec::{self, PbmFormat};
use dimdecon::{BitString, Grid};

const DARWIN: &str =
    "When we look to the individuals of the same variety or sub-variety of our older \
cultivated plants and animals, one of the first points which strikes us, is, that they generally \
differ much more from each other, than do the individuals of any one species or variety in a state \
of nature. When we reflect on the vast diversity of the plants and animals which have been \
cultivated, and which have varied during all ages under the most different climates and treatment, \
I think we are driven to conclude that this greater variability is simply due to our domestic \
productions having been raised under conditions of life not so uniform as, and somewhat different \
from, those to which the parent-species have been exposed under nature.";

fn fill(g: &mut Grid, x0: usize, y0: usize, w: usize, h: usize) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            g.set(&[x, y], true);
        }
    }
}

fn frame(g: &mut Grid, x0: usize, y0: usize, w: usize, h: usize) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            if y == y0 || y == y0 + h - 1 || x == x0 || x == x0 + w - 1 {
                g.set(&[x, y], true);
            }
        }
    }
}

/// A 23-column, 73-row glyph page: a repeated 5-row motif, filled and
/// hollow rectangles, a cross and a base bar.
fn glyph_page() -> Grid {
    let mut g = Grid::zeros(vec![23, 73]).unwrap();
    const MOTIF: [&str; 5] = [
        "11101110111011101110111",
        "10001000100010001000100",
        "11101110111011101110111",
        "00100010001000100010001",
        "00000000000000000000000",
    ];
    for rep in 0..4 {
        for (dy, row) in MOTIF.iter().enumerate() {
            for (x, c) in row.bytes().enumerate() {
                g.set(&[x, 1 + rep * 5 + dy], c == b'1');
            }
        }
    }
    fill(&mut g, 2, 23, 7, 8);
    frame(&mut g, 13, 23, 8, 8);
    fill(&mut g, 16, 26, 2, 2);
    fill(&mut g, 10, 36, 3, 17);
    fill(&mut g, 3, 42, 17, 3);
    frame(&mut g, 4, 56, 15, 9);
    fill(&mut g, 8, 59, 7, 3);
    fill(&mut g, 1, 68, 21, 3);
    g
}

/// A 100 × 80 page of stripes, bars and boxes: 8 000 bits with long runs.
fn structured_8000() -> Grid {
    let mut g = Grid::zeros(vec![100, 80]).unwrap();
    for y in (0..12).step_by(4) {
        fill(&mut g, 0, y, 100, 2);
    }
    fill(&mut g, 5, 16, 30, 20);
    frame(&mut g, 45, 16, 25, 20);
    fill(&mut g, 80, 14, 6, 60);
    for x in (4..70).step_by(6) {
        fill(&mut g, x, 44, 3, 14);
    }
    frame(&mut g, 10, 62, 60, 14);
    fill(&mut g, 30, 66, 20, 6);
    g
}

/// A 16³ voxel object: a solid box, a hollow box and a rod along the third
/// axis.
fn voxels() -> Grid {
    let inside = |v: usize, lo: usize, hi: usize| (lo..hi).contains(&v);
    let mut g = Grid::zeros(vec![16, 16, 16]).unwrap();
    for z in 0..16 {
        for y in 0..16 {
            for x in 0..16 {
                let solid = inside(x, 1, 6) && inside(y, 3, 12) && inside(z, 2, 9);
                let rod = inside(x, 12, 14) && inside(y, 1, 3) && inside(z, 1, 15);
                let hollow = inside(x, 8, 15)
                    && inside(y, 8, 15)
                    && inside(z, 7, 14)
                    && (x == 8 || x == 14 || y == 8 || y == 14 || z == 7 || z == 13);
                g.set(&[x, y, z], solid || rod || hollow);
            }
        }
    }
    g
}

fn main() -> dimdecon::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir)?;

    let page = glyph_page();
    codec::write_pbm(&page, dir.join("glyphs_23x73.pbm"), PbmFormat::Plain)?;
    codec::write_bits(&page.to_bitstring(), dir.join("glyphs_23x73.bits"))?;

    let text: String = DARWIN.chars().take(400).collect();
    std::fs::write(dir.join("darwin_400.txt"), &text)?;

    codec::write_bits(
        &structured_8000().to_bitstring(),
        dir.join("structured_8000.bits"),
    )?;
    codec::write_bits(&voxels().to_bitstring(), dir.join("voxels_16x16x16.bits"))?;

    let bits: BitString = page.to_bitstring();
    eprintln!("glyph page: {} bits, {} set", bits.len(), bits.count_ones());
    println!("{}", codec::render_ascii(&page));
    Ok(())
}
