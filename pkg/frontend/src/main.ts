/**
 * Entry point: hash-based routing between the explorer (#/explore) and the
 * study UI (#/study), plus the dataset-upload bootstrap for the explorer.
 */

import { ApiClient } from "./api.js";
import { vegaRenderer } from "./chart.js";
import { ExploreView } from "./explore.js";
import { StudyView } from "./study.js";

const DEFAULT_BACKEND = "student";

function exploreScreen(root: HTMLElement, api: ApiClient): void {
  root.innerHTML = "";
  const uploadForm = document.createElement("form");
  uploadForm.className = "upload-form";

  const nameInput = document.createElement("input");
  nameInput.type = "text";
  nameInput.placeholder = "Dataset name";
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.accept = ".csv,text/csv";
  const uploadButton = document.createElement("button");
  uploadButton.type = "submit";
  uploadButton.textContent = "Upload CSV";
  uploadForm.append(nameInput, fileInput, uploadButton);

  const viewRoot = document.createElement("div");
  root.append(uploadForm, viewRoot);

  uploadForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    if (!file || !nameInput.value.trim()) {
      return;
    }
    const handle = await api.uploadDataset(nameInput.value.trim(), await file.text());
    new ExploreView(viewRoot, api, {
      datasetId: handle.id,
      backend: DEFAULT_BACKEND,
      renderer: vegaRenderer,
    });
  });
}

function studyScreen(root: HTMLElement, api: ApiClient): void {
  root.innerHTML = "";
  const form = document.createElement("form");
  form.className = "participant-form";
  const idInput = document.createElement("input");
  idInput.type = "text";
  idInput.placeholder = "Participant id";
  const expertiseInput = document.createElement("input");
  expertiseInput.type = "number";
  expertiseInput.min = "1";
  expertiseInput.max = "5";
  expertiseInput.placeholder = "Expertise (1–5, optional)";
  const startButton = document.createElement("button");
  startButton.type = "submit";
  startButton.textContent = "Start";
  form.append(idInput, expertiseInput, startButton);

  const viewRoot = document.createElement("div");
  root.append(form, viewRoot);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!idInput.value.trim()) {
      return;
    }
    const expertise =
      expertiseInput.value === "" ? undefined : Number(expertiseInput.value);
    const view = new StudyView(viewRoot, api, vegaRenderer);
    view.pending = view.start(idInput.value.trim(), expertise);
  });
}

export function route(root: HTMLElement, api: ApiClient, hash: string): void {
  if (hash.startsWith("#/study")) {
    studyScreen(root, api);
  } else {
    exploreScreen(root, api);
  }
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (root === null) {
    throw new Error("missing #app mount point");
  }
  const api = new ApiClient("");
  const render = () => route(root, api, window.location.hash || "#/explore");
  window.addEventListener("hashchange", render);
  render();
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  bootstrap();
}
