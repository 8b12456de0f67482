/**
 * DOM layer: applies a computed Scene to an SVG with d3 and wires the
 * controls.  Everything testable lives in scene.ts/viewstate.ts/app.ts;
 * this file only binds.
 */

import * as d3 from "d3";

import { Explorer } from "./app.js";
import { ApiClient } from "./api.js";
import type { Scene, SceneNode } from "./scene.js";
import { decodeState, type ViewState } from "./viewstate.js";

const WIDTH = 960;
const HEIGHT = 720;

function px(v: number, extent: number): number {
  // Unit-square service coordinates -> pixels, with a small margin.
  return 40 + v * (extent - 80);
}

export function applyScene(svgEl: SVGSVGElement, scene: Scene, onClick: (key: string) => void): void {
  const svg = d3.select(svgEl);
  svg.selectAll("*").remove();
  const root = svg.append("g");

  svg.call(
    d3
      .zoom<SVGSVGElement, unknown>()
      .scaleExtent([0.3, 8])
      .on("zoom", (ev) => root.attr("transform", ev.transform)),
  );

  if (scene.empty) {
    root
      .append("text")
      .attr("x", WIDTH / 2)
      .attr("y", HEIGHT / 2)
      .attr("text-anchor", "middle")
      .attr("class", "empty-note")
      .text(scene.note);
    return;
  }

  const pos = new Map(scene.nodes.map((n) => [n.key, n]));

  root
    .selectAll("line")
    .data(scene.edges)
    .join("line")
    .attr("x1", (e) => px(pos.get(e.source)?.x ?? 0.5, WIDTH))
    .attr("y1", (e) => px(pos.get(e.source)?.y ?? 0.5, HEIGHT))
    .attr("x2", (e) => px(pos.get(e.target)?.x ?? 0.5, WIDTH))
    .attr("y2", (e) => px(pos.get(e.target)?.y ?? 0.5, HEIGHT))
    .attr("stroke", (e) => e.color)
    .attr("stroke-width", (e) => e.strokeWidth)
    .attr("stroke-opacity", (e) => (e.highlighted ? 0.9 : 0.5));

  const groups = root
    .selectAll<SVGGElement, SceneNode>("g.node")
    .data(scene.nodes, (n) => n.key)
    .join("g")
    .attr("class", "node")
    .attr("transform", (n) => `translate(${px(n.x, WIDTH)},${px(n.y, HEIGHT)})`)
    .style("cursor", (n) => (n.isQuery ? "default" : "pointer"))
    .on("click", (_ev, n) => {
      if (!n.isQuery) onClick(n.key);
    });

  groups
    .append("circle")
    .attr("r", (n) => n.radius)
    .attr("fill", (n) => n.color)
    .append("title")
    .text((n) => n.tooltip);

  groups
    .append("text")
    .attr("dy", (n) => -n.radius - 3)
    .attr("text-anchor", "middle")
    .style("font-size", (n) => `${n.fontSize}px`)
    .text((n) => n.key);

  const legend = root.append("g").attr("transform", "translate(10, 20)");
  scene.legend.forEach((entry, i) => {
    legend
      .append("text")
      .attr("y", i * 18)
      .text(`${entry.prefix}: ${entry.count} clusters`);
  });
}

export function bootstrap(doc: Document): Explorer {
  const svg = doc.querySelector("svg")!;
  const searchBox = doc.querySelector<HTMLInputElement>("#search")!;
  const showSlider = doc.querySelector<HTMLInputElement>("#show")!;
  const fontSlider = doc.querySelector<HTMLInputElement>("#font")!;
  const backBtn = doc.querySelector<HTMLButtonElement>("#back")!;
  const errorBox = doc.querySelector<HTMLElement>("#error")!;

  const api = new ApiClient((url) => fetch(url));
  const explorer = new Explorer(
    api,
    (scene) => {
      errorBox.textContent = "";
      applyScene(svg as SVGSVGElement, scene, (key) => void explorer.clickNode(key));
    },
    {
      onUrlChange: (query) => history.replaceState(null, "", `?${query}`),
      onError: (err) => {
        errorBox.textContent = `${err.message} — `;
        const retry = doc.createElement("a");
        retry.href = "#";
        retry.textContent = "retry";
        retry.onclick = (ev) => {
          ev.preventDefault();
          void explorer.retry();
        };
        errorBox.appendChild(retry);
      },
    },
  );

  searchBox.addEventListener("change", () => void explorer.search(searchBox.value));
  showSlider.addEventListener("change", () => void explorer.setShow(Number(showSlider.value)));
  fontSlider.addEventListener("input", () => explorer.setFontScale(Number(fontSlider.value)));
  backBtn.addEventListener("click", () => void explorer.goBack());

  doc.querySelectorAll<HTMLInputElement>("input.type-filter").forEach((box) => {
    box.addEventListener("change", () => {
      const ticked = [...doc.querySelectorAll<HTMLInputElement>("input.type-filter:checked")];
      void explorer.setTypes(ticked.map((b) => b.value));
    });
  });

  const shared = decodeState(location.search.replace(/^\?/, ""));
  if (shared.input) void explorer.restore(shared as ViewState);
  return explorer;
}
