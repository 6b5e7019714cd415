import { HttpApiClient } from "./api.js";
import { SelectionStore, decodeChosen, encodeChosen } from "./state.js";
import { DEFAULT_VIEW_OPTIONS, renderApp, type ViewOptions } from "./view.js";
import type { JsonGraph } from "./types.js";

function syncUrl(chosen: ReadonlySet<string>): void {
    const url = new URL(window.location.href);
    const encoded = encodeChosen(chosen);
    if (encoded === "") {
        url.searchParams.delete("chosen");
    } else {
        url.searchParams.set("chosen", encoded);
    }
    window.history.replaceState(null, "", url);
}

function wire(root: HTMLElement, catalog: JsonGraph, store: SelectionStore): void {
    let options: ViewOptions = DEFAULT_VIEW_OPTIONS;

    const render = () => {
        root.innerHTML = renderApp(catalog, store.state, options);
    };
    store.subscribe(render);
    store.subscribe(() => syncUrl(store.state.chosen));

    root.addEventListener("click", (event) => {
        const target = (event.target as HTMLElement).closest("button");
        if (target === null) {
            return;
        }
        const toggleId = target.getAttribute("data-toggle");
        if (toggleId !== null) {
            store.toggle(toggleId);
            return;
        }
        if (target.hasAttribute("data-add-all")) {
            store.addAllRequired();
        } else if (target.hasAttribute("data-plan")) {
            void store.requestPlan();
        } else if (target.hasAttribute("data-dismiss")) {
            store.dismissError();
        } else if (target.hasAttribute("data-dismiss-notice")) {
            store.dismissNotice();
        } else if (target.hasAttribute("data-objective")) {
            const tag = target.getAttribute("data-objective")!;
            const next = new Set(options.objectives);
            if (next.has(tag)) {
                next.delete(tag);
            } else {
                next.add(tag);
            }
            options = { ...options, objectives: next };
            render();
        }
    });

    root.addEventListener("change", (event) => {
        const target = event.target as HTMLElement;
        if (target.hasAttribute("data-show-excluded")) {
            options = { ...options, showExcluded: (target as HTMLInputElement).checked };
            render();
        }
    });

    root.addEventListener("submit", (event) => {
        const form = event.target as HTMLFormElement;
        if (!form.hasAttribute("data-substitute")) {
            return;
        }
        event.preventDefault();
        const from = (form.elements.namedItem("from") as HTMLSelectElement | null)?.value;
        const to = (form.elements.namedItem("to") as HTMLSelectElement | null)?.value;
        if (from && to) {
            void store.substitute(from, to);
        }
    });

    render();
}

async function boot(): Promise<void> {
    const root = document.getElementById("app");
    if (root === null) {
        return;
    }
    root.innerHTML = `<p class="empty">loading map&hellip;</p>`;
    const api = new HttpApiClient();
    let catalog: JsonGraph;
    try {
        catalog = await api.fetchMap();
    } catch (failure) {
        const message = failure instanceof Error ? failure.message : String(failure);
        root.innerHTML = `<div class="banner" role="alert">failed to load the map: ${message}</div>`;
        return;
    }
    const store = new SelectionStore(
        api,
        catalog.practices.map((p) => p.id),
    );
    wire(root, catalog, store);

    const fromUrl = decodeChosen(new URLSearchParams(window.location.search).get("chosen"));
    if (fromUrl.length > 0) {
        store.setChosen(fromUrl);
    }
}

void boot();
