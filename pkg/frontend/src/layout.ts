import type { BlockPayload, CaseDocumentPayload, NodePayload } from "./types.js";

/** A positioned element of the drawing: a case node or an argument block. */
export interface LayoutNode {
  id: string;
  element: "node" | "block";
  x: number; // column units
  y: number; // row units
}

export interface LayoutEdge {
  from: string;
  to: string;
  kind: "support" | "subclaim" | "sideclaim" | "defeat";
}

export interface Layout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  columns: number;
  rows: number;
}

interface Indexed {
  nodes: Map<string, NodePayload>;
  blocks: Map<string, BlockPayload>;
  blockOfParent: Map<string, BlockPayload>;
}

function index(document: CaseDocumentPayload): Indexed {
  const nodes = new Map(document.case.nodes.map((n) => [n.id, n]));
  const blocks = new Map(document.case.blocks.map((b) => [b.id, b]));
  const blockOfParent = new Map(document.case.blocks.map((b) => [b.parent, b]));
  return { nodes, blocks, blockOfParent };
}

/** Ids of everything inside a defeater's subcase (the defeater excluded). */
export function defeaterSubtree(document: CaseDocumentPayload, defeaterId: string): Set<string> {
  const { nodes, blockOfParent } = index(document);
  const subtree = new Set<string>();
  const queue = [defeaterId];
  while (queue.length > 0) {
    const current = queue.pop()!;
    const block = blockOfParent.get(current);
    if (block && !subtree.has(block.id)) {
      subtree.add(block.id);
      for (const child of [...block.subchildren, ...(block.sideclaims ?? [])]) {
        if (!subtree.has(child)) {
          subtree.add(child);
          queue.push(child);
        }
      }
    }
    // Defeaters raised against subcase members belong to the subtree too.
    for (const node of nodes.values()) {
      if (
        node.type === "defeater" &&
        node.target != null &&
        (subtree.has(node.target) || node.target === current) &&
        node.id !== defeaterId &&
        !subtree.has(node.id)
      ) {
        subtree.add(node.id);
        queue.push(node.id);
      }
    }
  }
  subtree.delete(defeaterId);
  return subtree;
}

function computeDepths(document: CaseDocumentPayload): Map<string, number> {
  const depth = new Map<string, number>();
  depth.set(document.case.top, 0);
  const blockList = document.case.blocks;
  const defeaters = document.case.nodes.filter((n) => n.type === "defeater");
  // Longest-path relaxation; the graph is a DAG so this settles quickly.
  const passes = blockList.length + defeaters.length + 2;
  for (let i = 0; i < passes; i++) {
    let changed = false;
    const bump = (id: string, value: number) => {
      if ((depth.get(id) ?? -1) < value) {
        depth.set(id, value);
        changed = true;
      }
    };
    for (const block of blockList) {
      const parentDepth = depth.get(block.parent);
      if (parentDepth === undefined) continue;
      bump(block.id, parentDepth + 1);
      const blockDepth = depth.get(block.id)!;
      for (const child of [...block.subchildren, ...(block.sideclaims ?? [])]) {
        bump(child, blockDepth + 1);
      }
    }
    for (const defeater of defeaters) {
      if (defeater.target == null) continue;
      const targetDepth = depth.get(defeater.target);
      if (targetDepth !== undefined) bump(defeater.id, targetDepth);
    }
    if (!changed) break;
  }
  // Anything never reached (detached material) goes below the rest.
  const fallback = Math.max(0, ...depth.values()) + 1;
  for (const node of document.case.nodes) {
    if (!depth.has(node.id)) depth.set(node.id, fallback);
  }
  for (const block of blockList) {
    if (!depth.has(block.id)) depth.set(block.id, fallback);
  }
  return depth;
}

/**
 * Deterministic layered layout. Claims and blocks fill each row left to
 * right; defeaters share their target's row and sit to its right, so a
 * defeater reads as a side-annotation on the node it challenges.
 */
export function layoutCase(document: CaseDocumentPayload, hidden: Set<string> = new Set()): Layout {
  const indexed = index(document);
  const depth = computeDepths(document);

  const rows = new Map<number, { main: string[]; defeaters: string[] }>();
  const rowOf = (id: string) => {
    const d = depth.get(id) ?? 0;
    if (!rows.has(d)) rows.set(d, { main: [], defeaters: [] });
    return rows.get(d)!;
  };
  const visibleNode = (id: string) => !hidden.has(id);

  for (const node of document.case.nodes) {
    if (!visibleNode(node.id)) continue;
    if (node.type === "defeater") rowOf(node.id).defeaters.push(node.id);
    else rowOf(node.id).main.push(node.id);
  }
  for (const block of document.case.blocks) {
    if (!visibleNode(block.id)) continue;
    rowOf(block.id).main.push(block.id);
  }

  const nodes: LayoutNode[] = [];
  let columns = 0;
  for (const [row, members] of [...rows.entries()].sort((a, b) => a[0] - b[0])) {
    members.main.sort();
    members.defeaters.sort();
    members.main.forEach((id, i) => {
      nodes.push({ id, element: indexed.blocks.has(id) ? "block" : "node", x: i, y: row });
    });
    members.defeaters.forEach((id, i) => {
      nodes.push({ id, element: "node", x: members.main.length + 0.5 + i, y: row });
    });
    columns = Math.max(columns, members.main.length + members.defeaters.length + 1);
  }

  const edges: LayoutEdge[] = [];
  for (const block of document.case.blocks) {
    if (!visibleNode(block.id) || !visibleNode(block.parent)) continue;
    edges.push({ from: block.parent, to: block.id, kind: "support" });
    for (const child of block.subchildren) {
      if (visibleNode(child)) edges.push({ from: block.id, to: child, kind: "subclaim" });
    }
    for (const side of block.sideclaims ?? []) {
      if (visibleNode(side)) edges.push({ from: block.id, to: side, kind: "sideclaim" });
    }
  }
  for (const node of document.case.nodes) {
    if (node.type === "defeater" && node.target != null) {
      if (visibleNode(node.id) && visibleNode(node.target)) {
        edges.push({ from: node.id, to: node.target, kind: "defeat" });
      }
    }
  }
  const rowCount = rows.size === 0 ? 0 : Math.max(...rows.keys()) + 1;
  return { nodes, edges, columns, rows: rowCount };
}
