/** Causality graph rendering: one layer per trace position, edges drawn as
 * arcs whose style encodes the edge type (structural solid, object dashed). */

import { escapeHtml } from "./format.js";
import type { GraphDoc, GraphEdge, GraphNode } from "./types.js";

export interface PlacedNode {
  node: GraphNode;
  x: number;
  y: number;
}

export interface EdgePath {
  edge: GraphEdge;
  d: string;
}

export interface Layout {
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: EdgePath[];
}

const X_NODE = 140;
const Y_STEP = 56;
const Y_TOP = 36;

export function layoutGraph(g: GraphDoc): Layout {
  const placed = g.nodes.map((node, i) => ({
    node,
    x: X_NODE,
    y: Y_TOP + i * Y_STEP,
  }));
  const byId = new Map(placed.map((p) => [p.node.id, p]));
  const edges: EdgePath[] = [];
  for (const edge of g.edges) {
    const a = byId.get(edge.from);
    const b = byId.get(edge.to);
    if (!a || !b) {
      continue;
    }
    // arc to the left of the timeline, bulging with the distance spanned
    const bulge = 24 + 14 * Math.abs(edge.to - edge.from);
    const midY = (a.y + b.y) / 2;
    edges.push({
      edge,
      d: `M ${a.x} ${a.y} Q ${a.x - bulge} ${midY} ${b.x} ${b.y}`,
    });
  }
  return {
    width: 560,
    height: Y_TOP + Math.max(g.nodes.length, 1) * Y_STEP,
    nodes: placed,
    edges,
  };
}

export function renderGraphSvg(g: GraphDoc): string {
  const l = layoutGraph(g);
  const parts: string[] = [
    `<svg viewBox="0 0 ${l.width} ${l.height}" ` +
      `xmlns="http://www.w3.org/2000/svg">`,
    `<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" ` +
      `markerWidth="6" markerHeight="6" orient="auto">` +
      `<path d="M 0 0 L 8 4 L 0 8 z"/></marker></defs>`,
  ];
  for (const { edge, d } of l.edges) {
    parts.push(
      `<path class="edge edge-${edge.type}" d="${d}" fill="none" ` +
        `marker-end="url(#arrow)"/>`,
    );
  }
  for (const { node, x, y } of l.nodes) {
    const cls = node.dir === "bwd" ? "node node-bwd" : "node";
    parts.push(
      `<circle class="${cls}" cx="${x}" cy="${y}" r="10"/>`,
      `<text class="node-key" x="${x}" y="${y + 4}">${node.key}</text>`,
      `<text class="node-label" x="${x + 20}" y="${y + 4}">` +
        `${escapeHtml(node.label)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
