/** Browser entry point: wires the views into the page.  All logic lives in
 * the testable modules; this file only touches the DOM. */

import { Api } from "./api.js";
import { WorkbenchApp } from "./app.js";
import { ClusterReviewView } from "./clusters.js";
import { ConcordanceView } from "./concordance.js";
import { PatternEditorView } from "./patterns.js";
import { renderTermBank } from "./termbank.js";
import type { ModifierClusteringData, TermBankData } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot() {
  const params = new URLSearchParams(window.location.search);
  const project = params.get("project") ?? "demo";
  const api = new Api(params.get("service") ?? "");
  const app = new WorkbenchApp(api, project);
  await app.refresh();

  el("project-name").textContent = project;
  renderPending();

  const editor = new PatternEditorView(api, project);
  const editorInput = el<HTMLTextAreaElement>("pattern-input");
  editorInput.addEventListener("input", async () => {
    await editor.edit(editorInput.value);
    el("pattern-status").innerHTML = editor.renderStatus();
  });
  el("pattern-run").addEventListener("click", async () => {
    await editor.run(Number((el<HTMLInputElement>("min-score")).value || "1"));
    el("pattern-groups").innerHTML = editor.renderGroups();
  });
  el("pattern-save").addEventListener("click", async () => {
    const name = (el<HTMLInputElement>("pattern-name")).value;
    const concept = (el<HTMLInputElement>("pattern-concept")).value || undefined;
    if (name) await app.savePattern(name, editorInput.value, concept);
  });

  const kwic = new ConcordanceView(api, project);
  el("kwic-run").addEventListener("click", async () => {
    kwic.setDistances(
      Number((el<HTMLInputElement>("kwic-left")).value || "4"),
      Number((el<HTMLInputElement>("kwic-right")).value || "2"),
    );
    await kwic.search(editorInput.value, 1.0);
    el("kwic-table").innerHTML = kwic.render();
  });

  function renderPending() {
    const list = el("pending");
    list.innerHTML = "";
    for (const item of app.info?.pending ?? []) {
      const li = document.createElement("li");
      li.textContent = `${item.kind}: ${item.artifact} `;
      const accept = document.createElement("button");
      accept.textContent = "accept";
      accept.addEventListener("click", async () => {
        await app.acceptReview(item.id);
        renderPending();
      });
      li.appendChild(accept);
      if (item.kind === "cut") {
        const open = document.createElement("button");
        open.textContent = "inspect";
        open.addEventListener("click", async () => {
          const view = await app.openDendrogram(item);
          const pane = el("dendrogram");
          const redraw = () => {
            pane.innerHTML = view.renderTree() + view.renderPreview();
            pane.querySelector<HTMLInputElement>(".cut-slider")?.addEventListener(
              "change",
              (event) => {
                view.setLevel(Number((event.target as HTMLInputElement).value));
                redraw();
              },
            );
            pane.querySelector(".cut-preview")?.insertAdjacentHTML(
              "beforeend",
              `<button id="confirm-cut">confirm cut</button>`,
            );
            el("confirm-cut").addEventListener("click", async () => {
              await app.confirmCut(item.id, view.level);
              renderPending();
            });
          };
          redraw();
        });
        li.appendChild(open);
      }
      if (item.kind === "modifiers") {
        const open = document.createElement("button");
        open.textContent = "edit";
        open.addEventListener("click", async () => {
          const { artifact } = await api.artifact<ModifierClusteringData>(
            project,
            item.artifact,
          );
          const view = new ClusterReviewView(artifact);
          const pane = el("clusters");
          const redraw = () => {
            pane.innerHTML =
              view.render() + `<button id="confirm-modifiers">confirm</button>`;
            pane.querySelectorAll<HTMLButtonElement>(".to-rest").forEach((button) =>
              button.addEventListener("click", () => {
                view.markForRest(button.dataset.word ?? "");
                redraw();
              }),
            );
            el("confirm-modifiers").addEventListener("click", async () => {
              await app.editModifiers(item.id, view.editPayload().to_rest);
              renderPending();
            });
          };
          redraw();
        });
        li.appendChild(open);
      }
      if (item.kind === "bank") {
        const open = document.createElement("button");
        open.textContent = "view";
        open.addEventListener("click", async () => {
          const { artifact } = await api.artifact<TermBankData>(project, item.artifact);
          el("termbank").innerHTML = renderTermBank(artifact);
        });
        li.appendChild(open);
      }
      list.appendChild(li);
    }
  }
}

boot().catch((error) => {
  document.body.insertAdjacentHTML(
    "afterbegin",
    `<p class="boot-error">${String(error)}</p>`,
  );
});
