import "./style.css";
import { ApiClient } from "./api";
import { createApp } from "./app";
import { renderScore } from "./render";

const apiBase = import.meta.env.VITE_API_BASE ?? "";
createApp(document.getElementById("app")!, new ApiClient(apiBase), renderScore);
