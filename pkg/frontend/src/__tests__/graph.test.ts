import { describe, expect, it } from "vitest";

import { layoutGraph, renderGraphSvg } from "../graph.js";
import type { GraphDoc } from "../types.js";

const G: GraphDoc = {
  nodes: [
    { id: 0, key: 0, dir: "fwd", label: "(0,{*},*):b<new a{}_*>" },
    { id: 1, key: 1, dir: "fwd", label: "(1,{*,0},*):c<new a{0}_0>" },
    { id: 2, key: 2, dir: "fwd", label: "(2,{*,0},*):a(z)" },
  ],
  edges: [
    { from: 0, to: 1, type: "object" },
    { from: 0, to: 2, type: "object" },
  ],
};

describe("layout", () => {
  it("layers nodes by trace order, top to bottom", () => {
    const l = layoutGraph(G);
    const ys = l.nodes.map((p) => p.y);
    expect(ys).toEqual([...ys].sort((a, b) => a - b));
    expect(new Set(ys).size).toBe(3);
  });

  it("anchors edge paths at both endpoint nodes", () => {
    const l = layoutGraph(G);
    const byId = new Map(l.nodes.map((p) => [p.node.id, p]));
    for (const { edge, d } of l.edges) {
      const a = byId.get(edge.from)!;
      const b = byId.get(edge.to)!;
      expect(d.startsWith(`M ${a.x} ${a.y}`)).toBe(true);
      expect(d.endsWith(`${b.x} ${b.y}`)).toBe(true);
    }
  });

  it("spans longer dependencies with wider arcs", () => {
    const l = layoutGraph(G);
    // control x sits left of the timeline; wider arcs push further left
    const controlX = (d: string) => Number(d.split(" ")[4]);
    const short = l.edges.find((e) => e.edge.to === 1)!;
    const long = l.edges.find((e) => e.edge.to === 2)!;
    expect(controlX(long.d)).toBeLessThan(controlX(short.d));
  });

  it("drops edges whose endpoints are not in the node list", () => {
    const l = layoutGraph({
      nodes: G.nodes.slice(0, 1),
      edges: G.edges,
    });
    expect(l.edges).toEqual([]);
  });

  it("grows with the trace", () => {
    const small = layoutGraph({ nodes: G.nodes.slice(0, 1), edges: [] });
    expect(layoutGraph(G).height).toBeGreaterThan(small.height);
  });
});

describe("svg rendering", () => {
  it("styles edges by type", () => {
    const svg = renderGraphSvg(G);
    expect(svg).toContain('class="edge edge-object"');
    expect(svg).not.toContain("edge-structural");
  });

  it("distinguishes structural edges", () => {
    const svg = renderGraphSvg({
      nodes: G.nodes,
      edges: [{ from: 0, to: 1, type: "structural" }],
    });
    expect(svg).toContain('class="edge edge-structural"');
  });

  it("marks backward nodes", () => {
    const svg = renderGraphSvg({
      nodes: [
        { id: 0, key: 0, dir: "fwd", label: "t" },
        { id: 1, key: 0, dir: "bwd", label: "u" },
      ],
      edges: [],
    });
    expect(svg).toContain('class="node node-bwd"');
  });

  it("prints the key inside each node and escapes labels", () => {
    const svg = renderGraphSvg(G);
    expect(svg).toContain('class="node-key"');
    expect(svg).toContain("b&lt;new a{}_*&gt;");
  });
});
