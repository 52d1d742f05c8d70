package org.jabref.net;

import java.net.http.HttpClient;
import java.util.List;

public class Fetcher {
}
