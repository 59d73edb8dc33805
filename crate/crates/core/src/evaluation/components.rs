use crate::imaging::BinaryMask;

/// Number of 4-connected foreground components.
pub fn connected_components(m: &BinaryMask) -> usize {
    let (w, h) = (m.width(), m.height());
    let bits = m.bits();
    let mut seen = vec![false; bits.len()];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..bits.len() {
        if bits[start] == 0 || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            let (x, y) = (p % w, p / w);
            let mut visit = |q: usize| {
                if bits[q] == 1 && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            };
            if x > 0 {
                visit(p - 1);
            }
            if x + 1 < w {
                visit(p + 1);
            }
            if y > 0 {
                visit(p - w);
            }
            if y + 1 < h {
                visit(p + w);
            }
        }
    }
    count
}
