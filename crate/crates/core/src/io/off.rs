use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::IoError;
use crate::cap::{Cap, Point3};
use crate::geom::signed_area2;

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Parses ASCII OFF with triangular faces. `#` starts a comment. The
/// boundary is the cycle of edges with a single incident face, oriented
/// counterclockwise seen from +z and starting at its smallest index.
pub fn parse_off(text: &str) -> Result<Cap, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("OFF") {
        return Err(parse_err(hline, "expected header OFF"));
    }
    let mut counts: Vec<&str> = head.collect();
    let mut cline = hline;
    if counts.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| parse_err(hline, "missing counts line"))?;
        cline = l;
        counts = c.split_whitespace().collect();
    }
    if counts.len() < 2 || counts.len() > 3 {
        return Err(parse_err(cline, "counts line must be `vertices faces [edges]`"));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|_| parse_err(cline, format!("bad count `{s}`")));
    let (nv, nf) = (count(counts[0])?, count(counts[1])?);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or_else(|| parse_err(cline, "too few vertex lines"))?;
        let xyz: Vec<f64> = s
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(l, format!("bad coordinate `{t}`"))))
            .collect::<Result<_, _>>()?;
        if xyz.len() != 3 || xyz.iter().any(|c| !c.is_finite()) {
            return Err(parse_err(l, "vertex line must hold three finite coordinates"));
        }
        vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or_else(|| parse_err(cline, "too few face lines"))?;
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.first() != Some(&"3") || toks.len() != 4 {
            return Err(parse_err(l, "only triangles `3 i j k` are supported"));
        }
        let mut t = [0usize; 3];
        for (k, tok) in toks[1..].iter().enumerate() {
            t[k] = tok.parse().map_err(|_| parse_err(l, format!("bad index `{tok}`")))?;
            if t[k] >= nv {
                return Err(parse_err(l, format!("index {} out of range", t[k])));
            }
        }
        triangles.push(t);
    }
    if let Some((l, _)) = lines.next() {
        return Err(parse_err(l, "unexpected trailing data"));
    }

    let boundary = boundary_cycle(&triangles)?;
    let mut cap = Cap { vertices, triangles, boundary };
    if signed_area2(&cap.boundary_polygon()) < 0.0 {
        cap.boundary.reverse();
        let i = (0..cap.boundary.len()).min_by_key(|&i| cap.boundary[i]).unwrap_or(0);
        cap.boundary.rotate_left(i);
        for t in &mut cap.triangles {
            t.swap(1, 2);
        }
    }
    Ok(cap)
}

fn boundary_cycle(triangles: &[[usize; 3]]) -> Result<Vec<usize>, IoError> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if let Some((e, c)) = count.iter().find(|(_, &c)| c > 2) {
        return Err(IoError::NonDisk(format!("edge {e:?} has {c} incident faces")));
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if count[&(a.min(b), a.max(b))] == 1 && next.insert(a, b).is_some() {
                return Err(IoError::NonDisk(format!("boundary passes twice through vertex {a}")));
            }
        }
    }
    let Some(&start) = next.keys().min() else {
        return Err(IoError::NonDisk("surface has no boundary".into()));
    };
    let mut cycle = vec![start];
    let mut v = next[&start];
    while v != start {
        cycle.push(v);
        v = *next
            .get(&v)
            .ok_or_else(|| IoError::NonDisk(format!("boundary is not closed at vertex {v}")))?;
        if cycle.len() > next.len() {
            return Err(IoError::NonDisk("boundary faces are inconsistently oriented".into()));
        }
    }
    if cycle.len() != next.len() {
        return Err(IoError::NonDisk("boundary is not a single cycle".into()));
    }
    Ok(cycle)
}

pub fn read_off(path: impl AsRef<Path>) -> Result<Cap, IoError> {
    parse_off(&std::fs::read_to_string(path)?)
}

/// OFF text with coordinates at 17 significant digits, enough to read back
/// every `f64` exactly.
pub fn format_off(cap: &Cap) -> String {
    let mut s = format!("OFF\n{} {} 0\n", cap.vertices.len(), cap.triangles.len());
    for p in &cap.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for t in &cap.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn write_off(cap: &Cap, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, format_off(cap))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "OFF\n# three-sided cap\n4 3 0\n0 0 0\n1 0 0\n0 1 0\n0.3 0.3 0.1\n3 0 1 3\n3 1 2 3\n3 2 0 3\n";

    #[test]
    fn tetra_cap() {
        let cap = parse_off(TETRA).unwrap();
        assert_eq!(cap.boundary, vec![0, 1, 2]);
        assert_eq!(cap.internal_vertices(), vec![3]);
    }

    #[test]
    fn clockwise_file_is_reoriented() {
        let cw = TETRA.replace("3 0 1 3\n3 1 2 3\n3 2 0 3", "3 1 0 3\n3 2 1 3\n3 0 2 3");
        let cap = parse_off(&cw).unwrap();
        assert_eq!(cap.boundary, vec![0, 1, 2]);
        assert_eq!(cap.triangles[0], [1, 3, 0]);
    }

    #[test]
    fn quad_face_names_line() {
        let text = TETRA.replace("3 2 0 3", "4 2 0 3 1");
        match parse_off(&text) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_header_and_counts() {
        assert!(matches!(parse_off("PLY\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_off("OFF\n4\n"), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_off(""), Err(IoError::Parse { .. })));
        let short = TETRA.replace("3 2 0 3\n", "");
        assert!(matches!(parse_off(&short), Err(IoError::Parse { .. })));
    }

    #[test]
    fn closed_surface_is_not_a_disk() {
        let text = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n3 2 0 3\n";
        assert!(matches!(parse_off(text), Err(IoError::NonDisk(_))));
    }

    #[test]
    fn two_components_rejected() {
        let text = "OFF\n6 2 0\n0 0 0\n1 0 0\n0 1 0\n5 0 0\n6 0 0\n5 1 0\n3 0 1 2\n3 3 4 5\n";
        assert!(matches!(parse_off(text), Err(IoError::NonDisk(_))));
    }

    #[test]
    fn round_trip_exact() {
        let cap = crate::capgen::generate_cap(&Default::default()).unwrap();
        let back = parse_off(&format_off(&cap)).unwrap();
        assert_eq!(back.vertices, cap.vertices);
        assert_eq!(back.triangles, cap.triangles);
        assert_eq!(back.boundary.len(), cap.boundary.len());
    }
}
