//! Iterative Tarjan over a dense index space.

const UNVISITED: u32 = u32::MAX;

/// Strongly connected components of the graph on `0..n` whose successor
/// lists are produced by `successors`.
///
/// Components are emitted in Tarjan order: every component appears before
/// any component that can reach it. Members within a component are listed
/// in stack-pop order.
pub fn tarjan<F>(n: usize, mut successors: F) -> Vec<Vec<usize>>
where
    F: FnMut(usize, &mut Vec<usize>),
{
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0u32;

    // (node, range of its successors in `succ_buf`, cursor)
    let mut frames: Vec<(usize, usize, usize)> = Vec::new();
    let mut succ_buf: Vec<usize> = Vec::new();
    let mut scratch = Vec::new();

    macro_rules! enter {
        ($v:expr) => {{
            let v = $v;
            index[v] = counter;
            low[v] = counter;
            counter += 1;
            stack.push(v);
            on_stack[v] = true;
            scratch.clear();
            successors(v, &mut scratch);
            let start = succ_buf.len();
            succ_buf.extend_from_slice(&scratch);
            frames.push((v, start, start));
        }};
    }

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        enter!(root);

        while let Some(&(v, start, cursor)) = frames.last() {
            if cursor < succ_buf.len() {
                let w = succ_buf[cursor];
                frames.last_mut().unwrap().2 += 1;
                if index[w] == UNVISITED {
                    enter!(w);
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            succ_buf.truncate(start);
            if let Some(&(parent, _, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}
